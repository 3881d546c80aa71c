#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "coevo/digraph.hpp"
#include "coevo/discretize.hpp"
#include "coevo/model.hpp"

namespace coevo {

enum class Example { ring, tree, dense, custom };

std::string to_string(Example e);
Example parse_example(const std::string& name);

// Initial phase distribution nu_0^x.
struct Nu0Spec {
  enum class Kind { curve, wave, uniform };
  Kind kind = Kind::curve;
  double offset = 0.5;
  double amplitude = 0.25;

  bool operator==(const Nu0Spec&) const = default;
};

std::string to_string(Nu0Spec::Kind k);
Nu0Spec::Kind parse_nu0_kind(const std::string& name);

// curve: delta at offset + amplitude sin(2 pi x)
// wave: density 1 + amplitude cos(2 pi (phi - x - offset)), exact cell averages on `grid` cells
// uniform: Lebesgue measure
FiberFunction nu0_fibers(const Nu0Spec& spec, std::size_t grid = 512);

// Ring, tree and dense networks: vertex space, g and h, the initial weight matrix
// of every admissible N and the limiting eta_0.
struct Preset {
  Example example = Example::ring;
  Space space = Space::circle;
  FourierFunction g, h;
  double a_floor = 0.0;  // a.c. lower bound of eta_0
  FiberFunction eta0;
};

Preset make_preset(Example e, std::size_t dense_grid = 1024);

// (j - i) mod N in {1, N-1}, weight N; the smallest sizes collapse to one neighbour.
std::vector<double> ring_weights(std::size_t N);
// Nodes 1..N, children 2i, 2i+1 and parent floor(i/2), weight N.
std::vector<double> tree_weights(std::size_t N);
// 2^{-(i+j)/N} plus the tree.
std::vector<double> dense_weights(std::size_t N);
std::vector<double> preset_weights(Example e, std::size_t N);

bool is_tree_size(std::size_t N);
// Throws std::invalid_argument listing the admissible sizes 2^{k+1} - 1.
void require_tree_size(std::size_t N);

HybridMeasure ring_eta0(double x);
HybridMeasure tree_eta0(double x);
HybridMeasure dense_eta0(double x, std::size_t grid);

// eta_0 evaluated at the representatives of `partition`.
DigraphMeasure eta0_on(const Preset& p, const Partition& partition);

// log(5/4) / eps: the horizon of the dense example, used as T* by every preset.
double preset_horizon(double epsilon);

}  // namespace coevo
