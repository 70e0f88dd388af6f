#pragma once

#include "farkas_balance/dichotomy.hpp"
#include "farkas_balance/errors.hpp"
#include "farkas_balance/geometry.hpp"
#include "farkas_balance/io.hpp"
#include "farkas_balance/simplex.hpp"
#include "farkas_balance/verify.hpp"
#include "farkas_balance/version.hpp"
#include "farkas_balance/zp.hpp"
