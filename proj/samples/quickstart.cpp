// Trains a small model on the bundled two-community graph, synthesizes a
// graph of the same size and prints how far each metric drifted overall and
// on the protected community.
#include <fstream>
#include <iostream>

#include "fairgen/fairgen.hpp"

using namespace fairgen;

int main(int argc, char** argv) {
  const std::string data = argc > 1 ? argv[1] : FAIRGEN_SAMPLES;
  const Graph g = load_edge_list(data + "/community.edges");
  const LabelSet labels = load_labels(data + "/community.labels", g);
  const GroupMembership groups = load_protected(data + "/community.protected", g);

  TrainRunConfig cfg;
  std::ifstream conf(data + "/small.conf");
  read_config(conf, cfg);
  cfg.seed = 1;
  cfg.threads = default_threads();

  const RunArtifacts art = run_training(g, labels, groups, cfg);
  for (const auto& c : art.cycles)
    std::cout << "cycle " << c.cycle << ": lambda " << c.lambda << ", " << c.pseudo_labeled << " pseudo labels\n";

  const auto synth = synthesize_graph(art.generator, g, groups, start_distribution(art.positives, g.num_nodes()),
                                      cfg.sampler.walk_length, cfg.generation_factor, cfg.volume_tolerance, cfg.seed,
                                      cfg.threads);
  const Graph& out = synth.assembled.graph;
  std::cout << "original " << g.num_edges() << " edges, generated " << out.num_edges() << " edges\n";

  const MetricReport report = evaluate(g, out, &groups, cfg.threads);
  std::cout << "metric\tR\tR+\n";
  for (const auto& row : report.rows)
    std::cout << metric_name(row.metric) << '\t' << detail::format_number(row.overall.value) << '\t'
              << detail::format_number(row.protected_.value) << '\n';
}
