#pragma once

#include <string>

#include "json.hpp"

#include "fp3d/eo.hpp"
#include "fp3d/hypergraph.hpp"
#include "fp3d/squeeze.hpp"
#include "fp3d/wirelength.hpp"

namespace fp3d {

using nlohmann::json;

// {"blocks":b,"nets":n,"neighbors":{"min":..,"max":..,"avg":..,"avg_exact":..}}
json stats_json(const NeighborStats& s);

// {"shape":[nx,ny,nz],"cells":{name:[x,y,z],...},"fitness":f}
json grid_placement_json(const LayoutHypergraph& h, const GridPlacement& p, double fitness);

// cells keyed by component label; labels resolved against h
GridPlacement grid_placement_from_json(const LayoutHypergraph& h, const json& j);

// {"layers":n,"rally":[px,py],"boxes":[{"name":..,"x":..,"y":..,"layer":..,"w":..,"h":..}]}
json geometry_json(const GeometricPlacement& g);
GeometricPlacement geometry_from_json(const json& j);

// {"total":..,"die_height":..,"per_net":{name:..}}
json wirelength_json(const WirelengthReport& r, bool per_net = true);

json load_json_file(const std::string& path);  // IoError / InputError

}  // namespace fp3d
