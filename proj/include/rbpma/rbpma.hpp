#pragma once

#include "rbpma/admm.hpp"
#include "rbpma/clustering.hpp"
#include "rbpma/errors.hpp"
#include "rbpma/io.hpp"
#include "rbpma/kernel.hpp"
#include "rbpma/matrix.hpp"
#include "rbpma/metrics.hpp"
#include "rbpma/penalty.hpp"
#include "rbpma/sbm.hpp"
#include "rbpma/spectral.hpp"
#include "rbpma/version.hpp"
