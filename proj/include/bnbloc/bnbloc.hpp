#ifndef BNBLOC_BNBLOC_HPP
#define BNBLOC_BNBLOC_HPP

#include "bnbloc/angular_grid.hpp"
#include "bnbloc/benchmark.hpp"
#include "bnbloc/cloud_io.hpp"
#include "bnbloc/errors.hpp"
#include "bnbloc/geometry.hpp"
#include "bnbloc/map_io.hpp"
#include "bnbloc/nodes.hpp"
#include "bnbloc/oracle.hpp"
#include "bnbloc/parallel.hpp"
#include "bnbloc/pipeline.hpp"
#include "bnbloc/point_cloud.hpp"
#include "bnbloc/rng.hpp"
#include "bnbloc/scene.hpp"
#include "bnbloc/search.hpp"
#include "bnbloc/search_config.hpp"
#include "bnbloc/voxel_map.hpp"

#endif  // BNBLOC_BNBLOC_HPP
