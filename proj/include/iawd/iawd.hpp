#ifndef IAWD_IAWD_HPP
#define IAWD_IAWD_HPP

#include "iawd/bootstrap.hpp"
#include "iawd/core.hpp"
#include "iawd/estimators.hpp"
#include "iawd/io.hpp"
#include "iawd/kernels.hpp"
#include "iawd/oracle.hpp"
#include "iawd/samplers.hpp"
#include "iawd/simharness.hpp"
#include "iawd/special_math.hpp"
#include "iawd/statistics.hpp"

#endif  // IAWD_IAWD_HPP
