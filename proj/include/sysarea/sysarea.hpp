#pragma once

#include "sysarea/errors.hpp"
#include "sysarea/sphere.hpp"
#include "sysarea/harmonics.hpp"
#include "sysarea/metric.hpp"
#include "sysarea/circles_funk.hpp"
#include "sysarea/geodesic.hpp"
#include "sysarea/minimax.hpp"
#include "sysarea/lab.hpp"
