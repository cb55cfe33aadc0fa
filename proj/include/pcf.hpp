#pragma once

#include "pcf/errors.hpp"
#include "pcf/tolerances.hpp"
#include "pcf/word.hpp"
#include "pcf/structure.hpp"
#include "pcf/structure_io.hpp"
#include "pcf/harmonic.hpp"
#include "pcf/model.hpp"
#include "pcf/cell_walk.hpp"
#include "pcf/energy.hpp"
#include "pcf/dimension.hpp"
#include "pcf/embedding.hpp"
#include "pcf/family_io.hpp"
#include "pcf/csv.hpp"
