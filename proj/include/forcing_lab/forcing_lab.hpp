#pragma once

#include "forcing_lab/errors.hpp"
#include "forcing_lab/rational.hpp"
#include "forcing_lab/seq.hpp"
#include "forcing_lab/delta_system.hpp"
#include "forcing_lab/sigma_family.hpp"
#include "forcing_lab/knaster.hpp"
#include "forcing_lab/gamma.hpp"
#include "forcing_lab/norm_trees.hpp"
#include "forcing_lab/measure_trees.hpp"
#include "forcing_lab/centered.hpp"
#include "forcing_lab/ordinal.hpp"
#include "forcing_lab/coloring.hpp"
#include "forcing_lab/serialize.hpp"
#include "forcing_lab/explorer.hpp"
#include "forcing_lab/suites.hpp"
