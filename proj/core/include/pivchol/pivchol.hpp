#pragma once

#include "pivchol/errors.hpp"
#include "pivchol/kernel.hpp"
#include "pivchol/metrics.hpp"
#include "pivchol/pcg.hpp"
#include "pivchol/pivoted_cholesky.hpp"
#include "pivchol/preconditioner.hpp"
#include "pivchol/serialization.hpp"
