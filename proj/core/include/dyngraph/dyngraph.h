#pragma once

#include "dyngraph/arena.h"
#include "dyngraph/cfsm.h"
#include "dyngraph/error.h"
#include "dyngraph/expr.h"
#include "dyngraph/graph.h"
#include "dyngraph/params.h"
#include "dyngraph/parallel.h"
#include "dyngraph/rnn.h"
#include "dyngraph/tensor.h"
#include "dyngraph/trainers.h"
#include "dyngraph/tree.h"
