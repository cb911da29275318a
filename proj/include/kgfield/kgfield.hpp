#pragma once

#include "errors.hpp"
#include "evolution.hpp"
#include "fft.hpp"
#include "field.hpp"
#include "grid.hpp"
#include "io.hpp"
#include "products.hpp"
#include "spectral_ops.hpp"
#include "verify.hpp"
