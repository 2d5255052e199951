// Plants a sparse community, computes its diffusion core and shows that a lazy
// walk started in the core escapes no faster than t * delta * conductance.
#include <iostream>
#include <numeric>

#include "fairgen/fairgen.hpp"

using namespace fairgen;

int main() {
  const auto planted = sbm_generate({50, 150}, 0.3, 0.005, 5);
  std::vector<NodeId> community(50);
  std::iota(community.begin(), community.end(), NodeId{0});
  const NodeMask s = make_mask(planted.graph.num_nodes(), community);
  const double phi = set_conductance(planted.graph, s);
  std::cout << "conductance " << phi << '\n';

  const TransitionMatrix m = TransitionMatrix::build(planted.graph);
  for (double delta : {0.3, 0.5}) {
    // The core shrinks as the horizon grows; past a few steps it is empty.
    const LemmaReport rep = verify_lemma_bound(planted.graph, s, delta, 2);
    std::cout << "delta " << delta << ": (" << delta << ", 2)-core " << rep.core.size() << " of " << community.size()
              << ", violations " << rep.violations << '\n';
    if (rep.core.empty()) continue;
    const NodeId x = rep.core.front();
    for (std::size_t t : {1u, 2u})
      std::cout << "  t=" << t << " escape " << escape_probability(m, s, x, t) << " <= bound "
                << static_cast<double>(t) * delta * phi << '\n';
  }
}
