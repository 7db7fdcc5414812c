#pragma once

#include "doflab/alignment.hpp"
#include "doflab/bounds.hpp"
#include "doflab/channel.hpp"
#include "doflab/json_io.hpp"
#include "doflab/linalg.hpp"
#include "doflab/matrix.hpp"
#include "doflab/neutralization.hpp"
#include "doflab/parallel.hpp"
#include "doflab/rates.hpp"
#include "doflab/scalar.hpp"
#include "doflab/version.hpp"
