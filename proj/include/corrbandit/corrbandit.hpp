#pragma once

#include "bandit.hpp"
#include "errors.hpp"
#include "experiment.hpp"
#include "fft.hpp"
#include "parallel.hpp"
#include "plot.hpp"
#include "random.hpp"
#include "signal.hpp"
#include "theory.hpp"
