#ifndef BIFURC_CONNECTED_HPP
#define BIFURC_CONNECTED_HPP

#include "bifurc/image.hpp"

namespace bifurc {

// Keeps only the largest 8-connected true component; everything else is
// cleared. Empty maps pass through unchanged. Equal-size tie goes to the
// component whose first pixel comes earliest in raster order.
BinaryMap largest_connected_component(const BinaryMap& map);

// Intersection of two equally-sized maps.
BinaryMap map_intersection(const BinaryMap& a, const BinaryMap& b);

} // namespace bifurc

#endif
