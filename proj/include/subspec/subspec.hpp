#pragma once

#include "subspec/annihilator.hpp"
#include "subspec/discretization.hpp"
#include "subspec/eigensolver.hpp"
#include "subspec/error.hpp"
#include "subspec/expression.hpp"
#include "subspec/group_io.hpp"
#include "subspec/group_model.hpp"
#include "subspec/linalg_exact.hpp"
#include "subspec/muckenhoupt.hpp"
#include "subspec/polynomial.hpp"
#include "subspec/spectral.hpp"
#include "subspec/weighted.hpp"
