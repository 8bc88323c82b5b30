#pragma once

#include "typik/contour.hpp"
#include "typik/dataset.hpp"
#include "typik/dist.hpp"
#include "typik/gof.hpp"
#include "typik/harness.hpp"
#include "typik/io.hpp"
#include "typik/models.hpp"
#include "typik/objective.hpp"
#include "typik/parallel.hpp"
#include "typik/rng.hpp"
#include "typik/special.hpp"
