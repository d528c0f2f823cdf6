#include "opdyn/experiments.hpp"

namespace opdyn {

PopulationSpec quintic_default_spec() {
  // The informed groups only hear each other through the uninformed group, which listens to them strongly.
  PopulationSpec s = all_to_all_spec(5, 5, 10);
  s.coupling = {{{1.0, 0.0, 0.3}, {0.0, 1.0, 0.3}, {2.0, 2.0, 1.0}}};
  return s;
}

std::vector<QuinticCase> run_quintic_transition(const QuinticOptions& opt) {
  require(!opt.betas.empty(), "quintic transition needs at least one beta");
  const Graph g = three_population_graph(opt.spec);
  std::vector<QuinticCase> out(opt.betas.size());
  parallel_for(opt.betas.size(), opt.jobs, [&](std::size_t i) {
    QuinticCase& c = out[i];
    c.beta = opt.betas[i];
    ParametrizedSystem sys = normalized_system(g, population_beta(opt.spec, c.beta, c.beta), opt.sigmoid);
    Equilibrium start = settle_equilibrium(sys, Vec::Zero(g.size()), opt.u_min);
    PitchforkOptions po;
    po.sigmoid = opt.sigmoid;
    po.u_min = opt.u_min;
    po.u_max = opt.u_max;
    c.diagram = run_bifurcation_diagram(sys, start, po);
    c.classification = "ambiguous";
    const auto& sps = c.diagram.trunk.singular_points;
    std::size_t first = sps.size();
    for (std::size_t k = 0; k < sps.size(); ++k)
      if (sps[k].kind == SingularKind::Pitchfork) {
        first = k;
        break;
      }
    if (first == sps.size()) return;
    c.u_star = sps[first].param;
    int folds_plus = 0, folds_minus = 0;
    for (const auto& sb : c.diagram.switched) {
      if (sb.from_singular != first) continue;
      for (const auto& sp : sb.branch.singular_points) {
        if (sp.kind != SingularKind::Fold) continue;
        c.fold_params.push_back(sp.param);
        (sb.direction > 0 ? folds_plus : folds_minus)++;
      }
    }
    if (folds_plus == 0 && folds_minus == 0)
      c.classification = "supercritical";
    else if (folds_plus == 1 && folds_minus == 1)
      c.classification = "subcritical";
  });
  return out;
}

}  // namespace opdyn
