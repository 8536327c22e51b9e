#pragma once

#include "rhsb/errors.hpp"
#include "rhsb/model.hpp"
#include "rhsb/quadrature.hpp"
#include "rhsb/scattering.hpp"
#include "rhsb/eigenbasis.hpp"
#include "rhsb/testspace.hpp"
#include "rhsb/transforms.hpp"
#include "rhsb/verify.hpp"
