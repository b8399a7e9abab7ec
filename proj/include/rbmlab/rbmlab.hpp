#pragma once

#include "rbmlab/bounds.hpp"
#include "rbmlab/constructor.hpp"
#include "rbmlab/distributions.hpp"
#include "rbmlab/experiments.hpp"
#include "rbmlab/io.hpp"
#include "rbmlab/parallel.hpp"
#include "rbmlab/projections.hpp"
#include "rbmlab/random.hpp"
#include "rbmlab/rbm.hpp"
#include "rbmlab/statespace.hpp"
