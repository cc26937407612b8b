#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dykls/functions.hpp"
#include "dykls/network.hpp"
#include "dykls/solver.hpp"

namespace dykls {

enum class Treatment { Prox, Subgrad };
enum class GenClass { FS, FNS, LSS, LSNS };

std::string treatment_name(Treatment t);
Treatment treatment_from_name(const std::string& s);
std::string gen_class_name(GenClass c);
GenClass gen_class_from_name(const std::string& s);

/// One generated node. F-NS shares A between branches (A2 absent); LS-NS
/// carries two independent matrices.
struct NodeInstance {
  GenClass cls;
  Treatment treatment = Treatment::Prox;  // meaningful for F-type nodes
  Mat A;
  Vec b;
  double c = 0.0;
  std::optional<Mat> A2;
  std::optional<Vec> b2;
  std::optional<double> c2;
};

/// A generated problem instance with its KKT certificate: the primal optimum
/// is the all-ones vector and v_i in df_i(1) by construction.
struct InstanceSpec {
  int m = 0;
  int preset = 0;
  std::uint64_t seed = 0;
  Graph graph{1, {}};
  std::vector<NodeInstance> nodes;
  std::vector<Vec> v;  // certificate subgradients at the optimum
  ProductPoint xbar;
};

/// Draws an instance for one of the four experiment presets. The draw order
/// is fixed: first v_i for every node, then per node (ascending) its
/// generator draws v (m), r (1) per matrix, and for nonsmooth classes the
/// split vector u (m) redrawn while |delta| < 1e-3.
InstanceSpec generate_instance(int preset, Treatment treatment,
                               std::uint64_t seed, int m = 10,
                               int num_nodes = 5);

struct ValidationReport {
  bool ok = true;
  std::vector<std::string> failures;
};

/// Checks the KKT identity, the certificate subgradients, boundary and
/// Slater conditions of level-set nodes.
ValidationReport validate_instance(const InstanceSpec& inst);

/// validate_instance, throwing ValidationFailed on any violation.
void ensure_valid(const InstanceSpec& inst);

/// Exact projection onto {g <= 0} by multiplier bisection; the reference
/// oracle for rate baselines and test suites.
Vec oracle_project_levelset(const Quadratic& g, const Vec& p);
Vec oracle_project_levelset(const MaxQuadratic& g, const Vec& p);
Vec oracle_project_levelset(const LevelFn& g, const Vec& p);

/// Node functions as solver specs under the instance's treatments.
Problem build_problem(const InstanceSpec& inst);

/// Reference quantities at the constructed optimum x* = (1,...,1).
struct Reference {
  ProductPoint x_star;
  double opt_primal = 0.0;        // F(z*) by strong duality
  double ref_sum = 0.0;           // 1/2|x*|^2 + sum_i f_i*(v_i)
  std::vector<double> fstar_at_v; // via Fenchel-Young at (1, v_i)
};
Reference build_reference(const InstanceSpec& inst);

/// Versioned canonical JSON; round-trips bit-exactly.
std::string instance_to_json(const InstanceSpec& inst);
InstanceSpec instance_from_json(const std::string& text);

/// Single-node LS-S construction used by one-set baselines: g smooth with
/// g(1) = 0, grad g(1) = v, xbar = 1 + v, so P_C(xbar) = 1 and dbar = |v|.
struct OneSetInstance {
  Quadratic g;
  Vec xbar;
  Vec x_star;
};
OneSetInstance generate_oneset_lss(std::uint64_t seed, int m = 10);

}  // namespace dykls
