// Acceptance run: one PASS/FAIL line per criterion. Tolerances and budgets are
// fixed below. `--known-red N` (repeatable) names criteria expected to fail;
// the exit status is 0 when every failure is listed and nonzero otherwise.
// Known-red criteria still print FAIL.
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fairgen/fairgen.hpp"
#include "support/graphs.hpp"
#include "support/oracles.hpp"

namespace fs = std::filesystem;
using namespace fairgen;

namespace {

// Pinned tolerances and budgets.
constexpr double kLemmaSlack = 1e-12;        // escape <= T delta phi + slack
constexpr double kEscapeOracleTol = 1e-12;   // sparse vs dense escape traces
constexpr double kMetricRelTol = 1e-9;       // real-valued metrics vs oracles
constexpr double kGradRelTol = 1e-4;         // analytic vs central differences
constexpr double kGradStep = 1e-5;
constexpr double kVolumeTol = 0.10;          // protected volume band
constexpr double kSlopeLo = 0.8, kSlopeHi = 1.3;
constexpr double kLemmaBudget = 30.0, kOracleBudget = 60.0, kEndToEndBudget = 900.0;  // seconds

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v, int precision = 4) {
  std::ostringstream s;
  s.precision(precision);
  s << v;
  return s.str();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size();
  return k % 2 ? v[k / 2] : 0.5 * (v[k / 2 - 1] + v[k / 2]);
}

std::vector<NodeId> range_nodes(NodeId lo, NodeId hi) {
  std::vector<NodeId> out(hi - lo);
  std::iota(out.begin(), out.end(), lo);
  return out;
}

// 1. Escape bound on the (delta, t)-diffusion cores of planted communities.
Outcome lemma_bound() {
  const auto t0 = std::chrono::steady_clock::now();
  std::size_t checked = 0, violations = 0, dense_violations = 0, empty_cores = 0, instances = 0;
  double worst_ratio = 0.0, oracle_gap = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::size_t small = 30 + 5 * (seed % 5);
    const auto pg = sbm_generate({small, 200 - small}, 0.3, 0.005, 1000 + seed);
    const NodeMask s = make_mask(200, range_nodes(0, static_cast<NodeId>(small)));
    for (double delta : {0.3, 0.5}) {
      for (std::size_t t = 1; t <= 10; ++t) {
        ++instances;
        const LemmaReport rep = verify_lemma_bound(pg.graph, s, delta, t);
        if (rep.core_empty()) {
          ++empty_cores;  // the precondition fails; nothing is claimed
          continue;
        }
        checked += rep.checked;
        violations += rep.violations;
        for (const auto& r : rep.nodes) worst_ratio = std::max(worst_ratio, r.worst_ratio);
        // Independent dense computation of the same bound for the core.
        for (NodeId x : rep.core) {
          for (std::size_t big_t = 1; big_t <= t; ++big_t) {
            const double dense = oracle::escape(pg.graph, s, x, big_t);
            const double bound = static_cast<double>(big_t) * delta * rep.conductance;
            oracle_gap = std::max(oracle_gap, std::abs(dense - escape_probability(pg.graph, mask_nodes(s), x, big_t)));
            dense_violations += dense > bound + kLemmaSlack;
          }
        }
      }
    }
  }
  const double secs = seconds_since(t0);
  return {violations == 0 && dense_violations == 0 && checked > 0 && oracle_gap <= kEscapeOracleTol && secs < kLemmaBudget,
          std::to_string(checked) + " core nodes checked over " + std::to_string(instances - empty_cores) + "/" +
              std::to_string(instances) + " (graph, delta, t) with non-empty cores, " + std::to_string(violations) +
              " violations (" + std::to_string(dense_violations) + " by dense recomputation), worst escape/bound " + fmt(worst_ratio) + ", dense-oracle gap " + fmt(oracle_gap, 2) +
              ", " + fmt(secs, 3) + " s"};
}

// 2. Metrics against brute-force oracles.
std::vector<Graph> oracle_graphs() {
  std::vector<Graph> out;
  std::mt19937_64 rng(2024);
  for (std::size_t i = 0; i < 100; ++i) {
    const std::size_t n = 5 + rng() % 96;
    const std::size_t pairs = n * (n - 1) / 2;
    switch (i % 4) {
      case 0:
        out.push_back(er_generate(n, std::max<std::size_t>(1, rng() % (pairs / 3 + 1)), rng()));
        break;
      case 1:
        out.push_back(ba_generate(std::max<std::size_t>(n, 5), 1 + rng() % 3, rng()));
        break;
      case 2:
        out.push_back(sbm_generate({n / 2, n - n / 2}, 0.3, 0.02, rng()).graph);
        break;
      default:  // sparse, usually disconnected with isolated nodes
        out.push_back(er_generate(n, std::max<std::size_t>(1, n / 2), rng()));
    }
  }
  return out;
}

Outcome metric_oracles() {
  const auto t0 = std::chrono::steady_clock::now();
  std::size_t mismatches = 0, compared = 0;
  std::string first;
  auto note = [&](std::size_t gi, Metric m, double got, double want) {
    if (mismatches < 3)
      first += "; graph " + std::to_string(gi) + " " + std::string(metric_name(m)) + " " + fmt(got, 17) + " vs oracle " +
               fmt(want, 17);
    ++mismatches;
  };
  const auto graphs = oracle_graphs();
  for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
    const Graph& g = graphs[gi];
    const MetricSet ms = compute_metrics(g);
    const auto get = [&](Metric m) { return ms[static_cast<std::size_t>(m)]; };
    const auto comps = oracle::component_sizes(g);
    const auto paths = oracle::shortest_paths(g);
    const double ad = static_cast<double>(oracle::adjacency(g).sum()) / static_cast<double>(g.num_nodes());
    const double integer_expected[] = {static_cast<double>(oracle::triangles(g)), static_cast<double>(comps.size()),
                                       static_cast<double>(comps.front())};
    const Metric integer_metrics[] = {Metric::tc, Metric::ncc, Metric::lcc};
    for (std::size_t k = 0; k < 3; ++k) {
      ++compared;
      const MetricValue v = get(integer_metrics[k]);
      if (!v.defined || v.value != integer_expected[k]) note(gi, integer_metrics[k], v.value, integer_expected[k]);
    }
    const std::pair<Metric, double> reals[] = {{Metric::ad, ad},
                                               {Metric::ple, oracle::ple(g)},
                                               {Metric::gini, oracle::gini(g)},
                                               {Metric::ede, oracle::ede(g)},
                                               {Metric::aspl, paths.aspl},
                                               {Metric::cc, oracle::clustering(g)}};
    for (const auto& [m, want] : reals) {
      ++compared;
      const MetricValue v = get(m);
      if (!std::isfinite(want)) {
        if (v.defined) note(gi, m, v.value, want);
        continue;
      }
      const double scale = std::max(std::abs(want), std::abs(v.value));
      if (!v.defined || std::abs(v.value - want) > kMetricRelTol * scale) note(gi, m, v.value, want);
    }
  }
  const double secs = seconds_since(t0);
  return {mismatches == 0 && secs < kOracleBudget, std::to_string(compared) + " metric values on " +
                                                       std::to_string(graphs.size()) + " graphs, " +
                                                       std::to_string(mismatches) + " mismatches" + first + ", " +
                                                       fmt(secs, 3) + " s"};
}

// 3. Forced values on K3 and connected regular graphs.
Graph circulant(std::size_t n, std::vector<std::size_t> jumps) {
  std::vector<Edge> e;
  for (NodeId u = 0; u < n; ++u)
    for (std::size_t j : jumps) e.emplace_back(u, static_cast<NodeId>((u + j) % n));
  return Graph::from_edges(n, e);
}

Graph hypercube(std::size_t dim) {
  const std::size_t n = std::size_t{1} << dim;
  std::vector<Edge> e;
  for (NodeId u = 0; u < n; ++u)
    for (std::size_t b = 0; b < dim; ++b)
      if (!(u & (1u << b))) e.emplace_back(u, static_cast<NodeId>(u | (1u << b)));
  return Graph::from_edges(n, e);
}

Graph petersen() {
  std::vector<Edge> e;
  for (NodeId i = 0; i < 5; ++i) {
    e.emplace_back(i, (i + 1) % 5);
    e.emplace_back(i, i + 5);
    e.emplace_back(i + 5, (i + 2) % 5 + 5);
  }
  return Graph::from_edges(10, e);
}

Outcome forced_values() {
  const MetricSet k3 = compute_metrics(fixtures::clique(3));
  const std::pair<Metric, double> expect[] = {{Metric::tc, 1},   {Metric::cc, 1},  {Metric::gini, 0},
                                              {Metric::ede, 1},  {Metric::aspl, 1}, {Metric::ncc, 1},
                                              {Metric::lcc, 3},  {Metric::ad, 2}};
  std::size_t k3_bad = 0;
  for (const auto& [m, v] : expect) {
    const auto& got = k3[static_cast<std::size_t>(m)];
    if (!got.defined || got.value != v) ++k3_bad;
  }
  std::vector<Graph> regular;
  for (std::size_t n = 4; n <= 40; n += 3) regular.push_back(fixtures::cycle(n));
  for (std::size_t n = 4; n <= 14; ++n) regular.push_back(fixtures::clique(n));
  for (std::size_t n = 9; n <= 60; n += 7) regular.push_back(circulant(n, {1, 2}));
  for (std::size_t n = 13; n <= 61; n += 12) regular.push_back(circulant(n, {1, 3, 5}));
  for (std::size_t d = 2; d <= 6; ++d) regular.push_back(hypercube(d));
  regular.push_back(petersen());
  std::size_t regular_bad = 0;
  for (const Graph& g : regular) {
    const std::size_t d0 = g.degree(0);
    bool is_regular = connected_components(g).size() == 1;
    for (NodeId u = 0; u < g.num_nodes(); ++u) is_regular = is_regular && g.degree(u) == d0;
    const MetricSet m = compute_metrics(g);
    if (!is_regular || m[static_cast<std::size_t>(Metric::gini)].value != 0.0 ||
        m[static_cast<std::size_t>(Metric::ede)].value != 1.0)
      ++regular_bad;
  }
  return {k3_bad == 0 && regular_bad == 0, "K3 " + std::to_string(8 - k3_bad) + "/8 exact; " +
                                               std::to_string(regular.size() - regular_bad) + "/" +
                                               std::to_string(regular.size()) +
                                               " connected regular graphs with Gini == 0 and EDE == 1"};
}

// 4. Self-paced selection: monotone in lambda, strict at the boundary.
EmbeddingTable random_features(std::size_t n, std::size_t d, std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  EmbeddingTable t;
  t.vectors.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < t.vectors.size(); ++i) t.vectors.data()[i] = nd(rng);
  return t;
}

Outcome self_paced_structure() {
  std::mt19937_64 rng(77);
  std::size_t monotone_bad = 0, boundary_bad = 0, entries = 0;
  for (std::size_t k = 0; k < 1000; ++k) {
    const std::size_t n = 5 + rng() % 20, dim = 2 + rng() % 6, classes = 2 + rng() % 3;
    const Discriminator d(dim, classes, rng(), 2 + rng() % 8);
    const EmbeddingTable feats = random_features(n, dim, rng);
    LabelSet truth(n, static_cast<int>(classes));
    truth.set(static_cast<NodeId>(rng() % n), static_cast<int>(rng() % classes));
    std::uniform_real_distribution<double> lam(0.01, 3.0);
    double l1 = lam(rng), l2 = lam(rng);
    if (l1 > l2) std::swap(l1, l2);
    if (l1 == l2) l2 = std::nextafter(l2, 10.0);
    const auto a = update_self_paced(d, feats, SelfPacedState(truth, l1));
    const auto b = update_self_paced(d, feats, SelfPacedState(truth, l2));
    for (std::size_t i = 0; i < a.v.size(); ++i) monotone_bad += a.v[i] > b.v[i];
    entries += a.v.size();

    // lambda placed exactly on an entry's -log Pr.
    const Eigen::Index r = static_cast<Eigen::Index>(rng() % n), c = static_cast<Eigen::Index>(rng() % classes);
    const double edge = -a.log_prob(r, c);
    const auto at = self_paced_select(a.log_prob, edge);
    const auto above = self_paced_select(a.log_prob, std::nextafter(edge, 1e300));
    const auto idx = static_cast<std::size_t>(r * a.log_prob.cols() + c);
    boundary_bad += at[idx] != 0 || above[idx] != 1;
  }
  return {monotone_bad == 0 && boundary_bad == 0,
          "1000 instances (" + std::to_string(entries) + " entries): " + std::to_string(monotone_bad) +
              " monotonicity breaks, " + std::to_string(boundary_bad) + " boundary errors"};
}

// 5. Gradients against central differences.
WalkBatch random_walks(std::size_t count, std::size_t len, std::size_t n, std::uint64_t seed) {
  WalkBatch b;
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng = make_rng(seed, "acceptance-walks", i);
    Walk w;
    for (std::size_t t = 0; t < len; ++t) w.nodes.push_back(static_cast<NodeId>(uniform_index(rng, n)));
    b.walks.push_back(w);
  }
  return b;
}

template <class Params, class Loss>
std::pair<double, std::size_t> fd_check(Params& params, const Params& grad, Loss&& loss) {
  std::vector<const double*> analytic;
  grad.for_each_block([&](const char*, const double* d, Eigen::Index) { analytic.push_back(d); });
  double worst = 0.0;
  std::size_t block = 0, count = 0;
  params.for_each_block([&](const char*, double* data, Eigen::Index size) {
    for (Eigen::Index i = 0; i < size; ++i) {
      const double keep = data[i];
      data[i] = keep + kGradStep;
      const double up = loss();
      data[i] = keep - kGradStep;
      const double down = loss();
      data[i] = keep;
      const double numeric = (up - down) / (2 * kGradStep);
      const double a = analytic[block][i];
      worst = std::max(worst, std::abs(a - numeric) / std::max(1e-6, std::abs(a) + std::abs(numeric)));
      ++count;
    }
    ++block;
  });
  return {worst, count};
}

Outcome gradients() {
  // Generator: n=10, d=8, T=4.
  GeneratorModel model({.nodes = 10, .dim = 8, .max_length = 4, .heads = 2, .ffn = 8}, 11);
  const auto pos = random_walks(4, 4, 10, 1), neg = random_walks(3, 4, 10, 2);
  std::vector<const Walk*> pp, nn;
  for (const auto& w : pos.walks) pp.push_back(&w);
  for (const auto& w : neg.walks) nn.push_back(&w);
  GenTrainConfig gc;
  gc.negative_weight = 0.3;
  GeneratorParams ggrad = GeneratorParams::zeros(model.shape());
  generator_batch_loss(model, pp, nn, gc, &ggrad);
  const auto [gen_worst, gen_count] =
      fd_check(model.params(), ggrad, [&] { return generator_batch_loss(model, pp, nn, gc, nullptr).first; });

  // Discriminator objective J_P + J_L + J_F: n=10, d=8, C=2.
  std::mt19937_64 rng(12);
  const auto feats = random_features(10, 8, rng);
  Discriminator disc(8, 2, 13, 6);
  const GroupMembership groups(10, range_nodes(0, 4));
  LabelSet truth(10, 2);
  truth.set(0, 0);
  truth.set(5, 1);
  truth.set(8, 0);
  const SelfPacedState sp = update_self_paced(disc, feats, SelfPacedState(truth, 1.5));
  const std::vector<NodeId> sup{0, 5, 8}, prop = range_nodes(0, 10);
  const FairLossWeights w{1.0, 1.0, 1.0};
  auto dgrad = DiscriminatorParams::zeros(8, 6, 2);
  discriminator_objective(disc, feats, truth, sup, sp, prop, groups, w, &dgrad);
  auto& dparams = disc.params();
  const auto [disc_worst, disc_count] = fd_check(dparams, dgrad, [&] {
    return discriminator_objective(disc, feats, truth, sup, sp, prop, groups, w, nullptr).total();
  });
  return {gen_worst < kGradRelTol && disc_worst < kGradRelTol,
          "generator worst rel. error " + fmt(gen_worst, 3) + " over " + std::to_string(gen_count) +
              " parameters; discriminator " + fmt(disc_worst, 3) + " over " + std::to_string(disc_count)};
}

// 6 and 7. End-to-end runs on planted graphs with a protected minority block.
struct EndToEnd {
  std::vector<bool> exact_m, covered, volume_ok;
  std::vector<double> volume_ratio;
  std::vector<double> full_ad, full_tc, uniform_ad, uniform_tc;
  double seconds = 0.0;
};

TrainRunConfig desk_config(std::uint64_t seed, double mix_ratio) {
  TrainRunConfig c;
  c.sampler.walk_length = 10;
  c.sampler.walks = 300;
  c.sampler.mix_ratio = mix_ratio;
  c.skipgram.dim = 32;
  c.heads = 4;
  c.ffn = 64;
  c.disc_hidden = 32;
  c.batch_size = 64;
  c.inner_iterations = 3;
  c.cycles = 4;
  c.epochs = 20;
  c.seed = seed;
  c.threads = default_threads();
  return c;
}

const EndToEnd& end_to_end() {
  static const EndToEnd result = [] {
    EndToEnd r;
    const auto t0 = std::chrono::steady_clock::now();
    for (std::uint64_t run = 0; run < 5; ++run) {
      const auto pg = sbm_generate({150, 50}, 0.1, 0.01, 100 + run);
      const Graph& g = pg.graph;
      // Ten labels per class; the minority class is the protected block.
      LabelSet labels(200, 2);
      std::vector<NodeId> prot;
      for (NodeId u = 0; u < 200; ++u) {
        if ((pg.block[u] == 0 && u % 15 == 0) || (pg.block[u] == 1 && u % 5 == 0)) labels.set(u, pg.block[u]);
        if (pg.block[u] == 1) prot.push_back(u);
      }
      const GroupMembership groups(200, prot);
      for (double mix : {0.5, 1.0}) {
        const TrainRunConfig cfg = desk_config(run, mix);
        const RunArtifacts art = run_training(g, labels, groups, cfg);
        const auto syn = synthesize_graph(art.generator, g, groups, start_distribution(art.positives, 200),
                                          cfg.sampler.walk_length, cfg.generation_factor, cfg.volume_tolerance,
                                          cfg.seed, cfg.threads);
        const Graph& out = syn.assembled.graph;
        const MetricReport rep = evaluate(g, out, &groups, cfg.threads);
        const double ad = report_row(rep, Metric::ad).protected_.value;
        const double tc = report_row(rep, Metric::tc).protected_.value;
        if (mix == 1.0) {
          r.uniform_ad.push_back(ad);
          r.uniform_tc.push_back(tc);
          continue;
        }
        r.full_ad.push_back(ad);
        r.full_tc.push_back(tc);
        r.exact_m.push_back(out.num_edges() == g.num_edges());
        bool covered = true;
        for (NodeId u = 0; u < 200; ++u) covered = covered && out.degree(u) >= 1;
        r.covered.push_back(covered);
        const double ratio = static_cast<double>(volume(out, groups.mask())) /
                             static_cast<double>(volume(g, groups.mask()));
        r.volume_ratio.push_back(ratio);
        r.volume_ok.push_back(std::abs(ratio - 1.0) <= kVolumeTol + 1e-12);
      }
    }
    r.seconds = seconds_since(t0);
    return r;
  }();
  return result;
}

Outcome assembler_invariants() {
  const EndToEnd& r = end_to_end();
  const auto count = [](const std::vector<bool>& v) { return std::count(v.begin(), v.end(), true); };
  std::string ratios;
  for (double x : r.volume_ratio) ratios += (ratios.empty() ? "" : " ") + fmt(x, 4);
  return {count(r.exact_m) == 5 && count(r.covered) == 5 && count(r.volume_ok) == 5,
          "5 runs: exact m " + std::to_string(count(r.exact_m)) + "/5, min degree >= 1 " +
              std::to_string(count(r.covered)) + "/5, protected volume ratios [" + ratios + "]"};
}

Outcome fairness_direction() {
  const EndToEnd& r = end_to_end();
  const double fa = median(r.full_ad), ua = median(r.uniform_ad), ft = median(r.full_tc), ut = median(r.uniform_tc);
  return {fa <= ua && ft <= ut && r.seconds < kEndToEndBudget,
          "median R+ AD full " + fmt(fa) + " vs uniform-start " + fmt(ua) + "; TC full " + fmt(ft) +
              " vs uniform-start " + fmt(ut) + "; 10 runs in " + fmt(r.seconds, 4) + " s"};
}

// 8 and 9 drive the command-line tool.
int run_cli(const std::string& args) {
  const std::string cmd = std::string(FAIRGEN_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

struct ScratchDir {
  fs::path dir;
  explicit ScratchDir(const std::string& name) : dir(fs::temp_directory_path() / ("fairgen_acceptance_" + name)) {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~ScratchDir() { fs::remove_all(dir); }
};

Outcome scalability() {
  ScratchDir tmp("benchmark");
  const auto nodes_out = tmp.dir / "nodes", density_out = tmp.dir / "density";
  if (run_cli("benchmark --nodes 500..5000 --density 0.005 --steps 10 --seed 1 --out " + nodes_out.string()) != 0 ||
      run_cli("benchmark --nodes 5000 --density 0.005..0.05 --steps 10 --seed 1 --out " + density_out.string()) != 0)
    return {false, "benchmark command failed"};
  auto slope = [](const fs::path& p, const char* key) {
    std::ifstream in(p / "reports/benchmark_fit.json");
    const auto j = nlohmann::json::parse(in);
    return j.contains(key) && j[key].is_number() ? j[key].get<double>() : std::nan("");
  };
  const double sn = slope(nodes_out, "slope_vs_nodes"), sd = slope(density_out, "slope_vs_density");
  const auto in_band = [](double s) { return s >= kSlopeLo && s <= kSlopeHi; };
  return {in_band(sn) && in_band(sd), "log-log slope of per-epoch time vs nodes " + fmt(sn, 3) + ", vs density " +
                                          fmt(sd, 3) + " (band [" + fmt(kSlopeLo) + ", " + fmt(kSlopeHi) + "])"};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome train_determinism() {
  ScratchDir tmp("determinism");
  // A self-contained input so the check does not depend on the sample files.
  const auto pg = sbm_generate({30, 15}, 0.3, 0.03, 9);
  {
    std::ofstream e(tmp.dir / "g.edges"), l(tmp.dir / "g.labels"), p(tmp.dir / "g.protected"), c(tmp.dir / "g.conf");
    write_edge_list(e, pg.graph);
    for (NodeId u : {0u, 4u, 8u}) l << pg.graph.external_id(u) << "\t0\n";
    for (NodeId u : {30u, 34u, 38u}) l << pg.graph.external_id(u) << "\t1\n";
    for (NodeId u = 30; u < 45; ++u) p << pg.graph.external_id(u) << '\n';
    c << "walk_length=6\nwalks=60\ndim=8\nheads=2\nffn=16\ndisc_hidden=8\nbatch_size=16\ncycles=2\nepochs=2\n";
  }
  const std::string inputs = " --graph " + (tmp.dir / "g.edges").string() + " --labels " +
                             (tmp.dir / "g.labels").string() + " --protected " + (tmp.dir / "g.protected").string() +
                             " --config " + (tmp.dir / "g.conf").string() + " --seed 21";
  if (run_cli("train" + inputs + " --out " + (tmp.dir / "a").string()) != 0 ||
      run_cli("train" + inputs + " --out " + (tmp.dir / "b").string()) != 0)
    return {false, "train command failed"};
  std::size_t compared = 0, differing = 0;
  for (const auto& entry : fs::recursive_directory_iterator(tmp.dir / "a")) {
    if (!entry.is_regular_file()) continue;
    const auto rel = fs::relative(entry.path(), tmp.dir / "a");
    const std::string top = rel.begin()->string();
    if (rel != "manifest.json" && top != "model" && top != "reports") continue;
    ++compared;
    differing += slurp(entry.path()) != slurp(tmp.dir / "b" / rel);
  }
  return {compared >= 5 && differing == 0, std::to_string(compared) +
                                               " manifest, model and report files compared, " +
                                               std::to_string(differing) + " differ"};
}

// 10. Identity comparison.
Outcome evaluate_identity() {
  std::size_t nonzero = 0, defined = 0, graphs = 0;
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto pg = sbm_generate({40 + 5 * s, 20}, 0.2, 0.02, 500 + s);
    std::vector<NodeId> prot;
    for (NodeId u = 0; u < pg.graph.num_nodes(); ++u)
      if (pg.block[u] == 1) prot.push_back(u);
    const GroupMembership groups(pg.graph.num_nodes(), prot);
    for (const Graph& g : {pg.graph, ba_generate(60, 2, s)}) {
      ++graphs;
      const GroupMembership& gm = g.num_nodes() == groups.num_nodes() ? groups : GroupMembership(60, range_nodes(0, 10));
      for (const auto& row : evaluate(g, g, &gm).rows) {
        for (const MetricValue* v : {&row.overall, &row.protected_}) {
          if (!v->defined) continue;
          ++defined;
          nonzero += v->value != 0.0;
        }
      }
    }
  }
  return {nonzero == 0 && defined > 0, std::to_string(defined) + " defined R/R+ values on " +
                                           std::to_string(graphs) + " graphs, " + std::to_string(nonzero) +
                                           " nonzero"};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> known_red, only;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--known-red" && i + 1 < argc) {
      known_red.insert(std::stoi(argv[++i]));
    } else if (arg == "--only" && i + 1 < argc) {
      only.insert(std::stoi(argv[++i]));
    } else {
      std::cerr << "usage: fairgen_acceptance [--known-red N]... [--only N]...\n";
      return 2;
    }
  }

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"escape bound on diffusion cores", lemma_bound},
      {"metrics match brute-force oracles", metric_oracles},
      {"forced values on K3 and regular graphs", forced_values},
      {"self-paced monotonicity and boundary", self_paced_structure},
      {"gradients match central differences", gradients},
      {"assembler invariants on planted graphs", assembler_invariants},
      {"protected discrepancy: full vs uniform-start ablation", fairness_direction},
      {"near-linear per-epoch scaling", scalability},
      {"train is byte-identical under a fixed seed", train_determinism},
      {"evaluate(g, g) is zero", evaluate_identity},
  };

  std::vector<int> unexpected;
  std::size_t passed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i + 1);
    if (!only.empty() && !only.count(id)) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const bool red = known_red.count(id) != 0;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  [" << id << "] " << criteria[i].first << ": " << o.detail
              << (!o.pass && red ? "  (known red)" : "") << (o.pass && red ? "  (listed as known red but passed)" : "")
              << std::endl;
    if (o.pass) {
      ++passed;
    } else if (!red) {
      unexpected.push_back(id);
    }
  }
  std::cout << passed << "/" << (only.empty() ? criteria.size() : only.size()) << " criteria pass";
  if (!unexpected.empty()) {
    std::cout << "; unexpected failures:";
    for (int id : unexpected) std::cout << ' ' << id;
  }
  std::cout << std::endl;
  return unexpected.empty() ? 0 : 1;
}
