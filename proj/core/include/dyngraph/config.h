#pragma once

// Element type of every tensor. Single precision is the default; building a
// translation unit with DYNGRAPH_USE_DOUBLE selects double precision, which
// the finite-difference suites rely on. The inline namespace keeps the two
// variants link-compatible inside one binary.

#ifdef DYNGRAPH_USE_DOUBLE
#define DYNGRAPH_BEGIN_NAMESPACE namespace dyngraph { inline namespace f64 {
#else
#define DYNGRAPH_BEGIN_NAMESPACE namespace dyngraph { inline namespace f32 {
#endif
#define DYNGRAPH_END_NAMESPACE } }

DYNGRAPH_BEGIN_NAMESPACE

#ifdef DYNGRAPH_USE_DOUBLE
using real = double;
#else
using real = float;
#endif

DYNGRAPH_END_NAMESPACE
