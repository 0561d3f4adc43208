#pragma once

#include "hmdiv/errors.hpp"
#include "hmdiv/shape.hpp"
#include "hmdiv/linalg.hpp"
#include "hmdiv/state.hpp"
#include "hmdiv/unit_basis.hpp"
#include "hmdiv/hierarchy.hpp"
#include "hmdiv/factorization.hpp"
#include "hmdiv/maxent.hpp"
#include "hmdiv/maximizers.hpp"
#include "hmdiv/two_qubit.hpp"
#include "hmdiv/random.hpp"
#include "hmdiv/io.hpp"
