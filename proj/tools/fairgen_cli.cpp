#include <openssl/evp.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fairgen/fairgen.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace fairgen;

namespace {

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "' for hashing");
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw Error("SHA-256 unavailable");
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(in.gcount()));
    if (in.eof()) break;
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest, &len);
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

/// Flags shared by every subcommand.
struct CommonOptions {
  std::string out;
  std::optional<std::uint64_t> seed;
  unsigned threads = default_threads();
  std::string config;
  std::vector<std::string> sets;
  bool force = false;
  bool allow_isolated = false;
};

void add_common(CLI::App* cmd, CommonOptions& o, bool needs_out = true) {
  auto* out = cmd->add_option("--out", o.out, "Output directory (created; must not exist unless --force)");
  if (needs_out) out->required();
  cmd->add_option("--seed", o.seed, "Master seed (default: config, then FAIRGEN_SEED, then 0)");
  cmd->add_option("--threads", o.threads, "Worker threads; results do not depend on it")->check(CLI::PositiveNumber);
  cmd->add_option("--config", o.config, "key=value config file")->check(CLI::ExistingFile);
  cmd->add_option("--set", o.sets, "Override one config key (key=value); repeatable");
  cmd->add_flag("--force", o.force, "Replace an existing output directory");
  cmd->add_flag("--allow-isolated", o.allow_isolated, "Keep nodes that only appear in self-loops");
}

/// Precedence: --seed, then --set / config file, then FAIRGEN_SEED, then 0.
TrainRunConfig resolve_config(const CommonOptions& o) {
  TrainRunConfig cfg;
  if (const char* env = std::getenv("FAIRGEN_SEED")) apply_setting(cfg, "seed", env);
  if (!o.config.empty()) {
    std::ifstream in(o.config);
    if (!in) throw Error("cannot open config '" + o.config + "'");
    read_config(in, cfg);
  }
  for (const auto& s : o.sets) apply_assignment(cfg, s);
  if (o.seed) cfg.seed = *o.seed;
  cfg.threads = o.threads;
  cfg.sampler.threads = o.threads;
  return cfg;
}

/// An output directory under construction. Files are written to a sibling
/// staging directory that is renamed into place only by commit(); an
/// uncommitted run removes its staging directory.
class Run {
 public:
  Run(std::string command, const CommonOptions& o, TrainRunConfig cfg)
      : command_(std::move(command)), final_(o.out), force_(o.force), cfg_(std::move(cfg)) {
    if (final_.empty()) throw Error("--out is required");
    if (fs::exists(final_) && !force_) throw Error("output directory '" + final_.string() + "' already exists");
    stage_ = final_;
    stage_ += ".partial";
    fs::remove_all(stage_);
    fs::create_directories(stage_);
  }
  Run(const Run&) = delete;
  Run& operator=(const Run&) = delete;
  ~Run() {
    if (!committed_) {
      std::error_code ec;
      fs::remove_all(stage_, ec);
    }
  }

  const TrainRunConfig& config() const { return cfg_; }

  fs::path file(const std::string& rel) {
    const fs::path p = stage_ / rel;
    fs::create_directories(p.parent_path());
    return p;
  }

  template <class Fn>
  void write(const std::string& rel, Fn&& fn) {
    std::ofstream out(file(rel), std::ios::binary);
    if (!out) throw Error("cannot create '" + rel + "'");
    fn(out);
    if (!out) throw Error("failed writing '" + rel + "'");
  }

  void input(const std::string& role, const std::string& path) {
    if (path.empty()) return;
    inputs_[role] = {{"path", path}, {"sha256", sha256_file(path)}};
  }

  void parameter(const std::string& key, json value) { params_[key] = std::move(value); }
  void warn(const std::string& w) {
    std::cerr << "fairgen " << command_ << ": warning: " << w << '\n';
    warnings_.push_back(w);
  }

  template <class Fn>
  auto timed(const std::string& stage, Fn&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    auto finish = [&] {
      timings_.push_back({stage, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()});
    };
    if constexpr (std::is_void_v<decltype(fn())>) {
      fn();
      finish();
    } else {
      auto r = fn();
      finish();
      return r;
    }
  }

  void commit() {
    write("config.snapshot", [&](std::ostream& out) { write_config(out, cfg_); });
    std::vector<std::string> rels;
    for (const auto& entry : fs::recursive_directory_iterator(stage_))
      if (entry.is_regular_file()) rels.push_back(fs::relative(entry.path(), stage_).generic_string());
    std::sort(rels.begin(), rels.end());
    json outputs = json::object();
    for (const auto& rel : rels) outputs[rel] = sha256_file(stage_ / rel);

    json config = json::object();
    std::istringstream snap([&] {
      std::ostringstream s;
      write_config(s, cfg_);
      return s.str();
    }());
    for (std::string line; std::getline(snap, line);) {
      const auto eq = line.find('=');
      config[line.substr(0, eq)] = line.substr(eq + 1);
    }
    json manifest = {{"toolkit", "fairgen"},
                     {"version", kVersion},
                     {"command", command_},
                     {"seed", cfg_.seed},
                     {"parameters", params_},
                     {"config", config},
                     {"inputs", inputs_},
                     {"outputs", outputs},
                     {"warnings", warnings_},
                     {"timings", "timings.json"}};
    write("manifest.json", [&](std::ostream& out) { out << manifest.dump(2) << '\n'; });
    json t = json::array();
    for (const auto& [stage, secs] : timings_) t.push_back({{"stage", stage}, {"seconds", secs}});
    write("timings.json", [&](std::ostream& out) { out << json{{"threads", cfg_.threads}, {"stages", t}}.dump(2) << '\n'; });

    if (fs::exists(final_)) fs::remove_all(final_);
    fs::rename(stage_, final_);
    committed_ = true;
  }

 private:
  std::string command_;
  fs::path final_, stage_;
  bool force_ = false;
  bool committed_ = false;
  TrainRunConfig cfg_;
  json inputs_ = json::object();
  json params_ = json::object();
  std::vector<std::string> warnings_;
  std::vector<std::pair<std::string, double>> timings_;
};

Graph load_graph(const std::string& path, const CommonOptions& o) {
  return load_edge_list(path, {.allow_isolated = o.allow_isolated});
}

WalkBatch load_walks(const std::string& path, const Graph& g) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open walks '" + path + "'");
  WalkBatch b = read_walks(in);
  for (const auto& w : b.walks)
    for (NodeId u : w.nodes)
      if (u >= g.num_nodes()) throw Error("walk file '" + path + "' references node " + std::to_string(u) + " outside the graph");
  return b;
}

ScoreMatrix load_scores(const std::string& path, const Graph& g) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open scores '" + path + "'");
  return read_scores(in, g.num_nodes());
}

GeneratorModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open model '" + path + "'");
  return load_checkpoint(in);
}

void write_start_distribution(std::ostream& out, const Graph& g, const std::vector<double>& dist) {
  for (NodeId u = 0; u < g.num_nodes(); ++u)
    if (dist[u] > 0.0) out << g.external_id(u) << '\t' << detail::format_double(dist[u]) << '\n';
}

std::vector<double> read_start_distribution(const std::string& path, const Graph& g) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open start distribution '" + path + "'");
  std::vector<double> dist(g.num_nodes(), 0.0);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::string id;
    double w = 0.0;
    if (!(fields >> id >> w)) throw ParseError("expected 'node<TAB>weight'", lineno);
    const auto u = g.find(id);
    if (!u) throw ParseError("unknown node '" + id + "'", lineno);
    dist[*u] = w;
  }
  return dist;
}

std::vector<double> uniform_start(const Graph& g) {
  std::vector<double> d(g.num_nodes(), 0.0);
  for (NodeId u : walkable_nodes(g)) d[u] = 1.0;
  return d;
}

json metric_json(const MetricValue& v) {
  json j = {{"value", number_or_null(v.value)}, {"defined", v.defined}};
  if (!v.note.empty()) j["note"] = v.note;
  return j;
}

json report_json(const MetricReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"metric", std::string(metric_name(row.metric))},
                    {"original", metric_json(row.original)},
                    {"generated", metric_json(row.generated)},
                    {"R", metric_json(row.overall)},
                    {"original_protected", metric_json(row.original_protected)},
                    {"generated_protected", metric_json(row.generated_protected)},
                    {"R_protected", metric_json(row.protected_)}});
  }
  return {{"original", {{"nodes", r.original_nodes}, {"edges", r.original_edges}}},
          {"generated", {{"nodes", r.generated_nodes}, {"edges", r.generated_edges}}},
          {"protected_nodes", r.protected_count},
          {"metrics", rows}};
}

/// "a..b" expands to `steps` evenly spaced values; "a,b,c" and "a" are literal.
std::vector<double> parse_sweep(const std::string& text, std::size_t steps) {
  std::vector<double> out;
  const auto dots = text.find("..");
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || s.empty()) throw Error("invalid sweep value '" + s + "'");
    return v;
  };
  if (dots != std::string::npos) {
    const double lo = number(text.substr(0, dots)), hi = number(text.substr(dots + 2));
    if (!(hi > lo) || steps < 2) throw Error("sweep '" + text + "' needs lo < hi and at least two steps");
    for (std::size_t i = 0; i < steps; ++i) out.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps - 1));
    return out;
  }
  std::istringstream in(text);
  for (std::string part; std::getline(in, part, ',');) out.push_back(number(part));
  if (out.empty()) throw Error("empty sweep");
  return out;
}

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double k = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double den = k * sxx - sx * sx;
  return den == 0.0 ? std::numeric_limits<double>::quiet_NaN() : (k * sxy - sx * sy) / den;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fairgen: fairness-aware graph generation toolkit"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  app.allow_windows_style_options(false);

  CommonOptions common;
  std::string graph_path, labels_path, protected_path, walks_path, model_path, scores_path, start_path,
      generated_path, subset_path;

  // sample
  auto* sample = app.add_subcommand("sample", "Draw positive context walks (and seed negatives)");
  add_common(sample, common);
  sample->add_option("--graph", graph_path, "Edge list")->required()->check(CLI::ExistingFile);
  sample->add_option("--labels", labels_path, "node<TAB>class file")->check(CLI::ExistingFile);

  // pretrain
  auto* pretrain = app.add_subcommand("pretrain", "Skip-gram node embeddings");
  add_common(pretrain, common);
  pretrain->add_option("--graph", graph_path, "Edge list")->required()->check(CLI::ExistingFile);
  pretrain->add_option("--walks", walks_path, "Walk corpus (default: sample uniform walks)")->check(CLI::ExistingFile);

  // train
  auto* train = app.add_subcommand("train", "Run the full learning loop");
  add_common(train, common);
  train->add_option("--graph", graph_path, "Edge list")->required()->check(CLI::ExistingFile);
  train->add_option("--labels", labels_path, "node<TAB>class file")->required()->check(CLI::ExistingFile);
  train->add_option("--protected", protected_path, "Protected node ids, one per line")->required()->check(CLI::ExistingFile);

  // generate
  std::size_t walk_count = 0;
  auto* generate = app.add_subcommand("generate", "Sample walks from a trained model and count transitions");
  add_common(generate, common);
  generate->add_option("--graph", graph_path, "Edge list the model was trained on")->required()->check(CLI::ExistingFile);
  generate->add_option("--model", model_path, "Generator checkpoint")->required()->check(CLI::ExistingFile);
  generate->add_option("--start", start_path, "Start distribution (node<TAB>weight)")->check(CLI::ExistingFile);
  generate->add_option("--count", walk_count, "Walks to draw (default: generation_factor * m transitions)");

  // assemble
  auto* assemble_cmd = app.add_subcommand("assemble", "Threshold a score matrix into a graph");
  add_common(assemble_cmd, common);
  assemble_cmd->add_option("--graph", graph_path, "Original edge list")->required()->check(CLI::ExistingFile);
  assemble_cmd->add_option("--scores", scores_path, "Score matrix")->required()->check(CLI::ExistingFile);
  assemble_cmd->add_option("--protected", protected_path, "Protected node ids")->check(CLI::ExistingFile);

  // augment
  double fraction = 0.05;
  auto* augment_cmd = app.add_subcommand("augment", "Add the best-scoring novel edges to the original graph");
  add_common(augment_cmd, common);
  augment_cmd->add_option("--graph", graph_path, "Original edge list")->required()->check(CLI::ExistingFile);
  augment_cmd->add_option("--scores", scores_path, "Score matrix")->required()->check(CLI::ExistingFile);
  augment_cmd->add_option("--fraction", fraction, "New edges as a fraction of m (default 0.05)");

  // evaluate
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Compare a generated graph with the original");
  add_common(evaluate_cmd, common);
  evaluate_cmd->add_option("--graph", graph_path, "Original edge list")->required()->check(CLI::ExistingFile);
  evaluate_cmd->add_option("--generated", generated_path, "Generated edge list")->required()->check(CLI::ExistingFile);
  evaluate_cmd->add_option("--protected", protected_path, "Protected node ids")->check(CLI::ExistingFile);

  // baseline
  std::string baseline_model;
  std::size_t nodes = 0, edges = 0, attach = 0;
  auto* baseline = app.add_subcommand("baseline", "Erdos-Renyi or Barabasi-Albert graph");
  add_common(baseline, common);
  baseline->add_option("--model", baseline_model, "er or ba")->required()->check(CLI::IsMember({"er", "ba"}));
  baseline->add_option("--nodes", nodes, "Node count")->required();
  baseline->add_option("--edges", edges, "Edge count (ER; BA derives attach from it when --attach is absent)");
  baseline->add_option("--attach", attach, "Edges per new node (BA)");

  // lemma-check
  double delta = 0.5;
  std::size_t steps = 10;
  auto* lemma = app.add_subcommand("lemma-check", "Verify the diffusion-core escape bound on a node set");
  add_common(lemma, common);
  lemma->add_option("--graph", graph_path, "Edge list")->required()->check(CLI::ExistingFile);
  lemma->add_option("--subset", subset_path, "Node set S, one id per line")->required()->check(CLI::ExistingFile);
  lemma->add_option("--delta", delta, "Core threshold in (0, 1) (default 0.5)");
  lemma->add_option("--steps", steps, "Largest horizon t (default 10)");

  // benchmark
  std::string node_sweep = "500..5000", density_sweep = "0.005";
  std::size_t sweep_steps = 10, repeats = 1;
  auto* bench = app.add_subcommand("benchmark", "Time sampling plus one training epoch on ER graphs");
  add_common(bench, common);
  bench->add_option("--nodes", node_sweep, "Node counts: a..b, a,b,c or a (default 500..5000)");
  bench->add_option("--density", density_sweep, "Edge densities in the same notation (default 0.005)");
  bench->add_option("--steps", sweep_steps, "Points in an a..b sweep (default 10)");
  bench->add_option("--repeats", repeats, "Timed repetitions per point; the minimum is kept (default 1)")
      ->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  const CLI::App* sub = app.get_subcommands().front();
  const std::string command = sub->get_name();
  try {
    const TrainRunConfig cfg = resolve_config(common);
    Run run(command, common, cfg);
    if (!common.config.empty()) run.input("config", common.config);
    // Every explicit option except those already captured elsewhere (seed and
    // config in their own fields, --set folded into config) or irrelevant to
    // the artifacts (out, threads, force).
    for (const CLI::Option* opt : sub->get_options()) {
      if (opt->count() == 0 || opt->get_lnames().empty()) continue;
      const std::string& name = opt->get_lnames().front();
      if (name == "help" || name == "out" || name == "threads" || name == "force" || name == "seed" ||
          name == "config" || name == "set")
        continue;
      const auto& res = opt->results();
      run.parameter(name, res.size() == 1 ? json(res.front()) : json(res));
    }

    if (command == "sample") {
      cfg.sampler.validate();
      run.input("graph", graph_path);
      run.input("labels", labels_path);
      const Graph g = run.timed("load", [&] { return load_graph(graph_path, common); });
      LabelSet labels = labels_path.empty() ? LabelSet(g.num_nodes(), 1) : load_labels(labels_path, g);
      SamplerConfig sc = cfg.sampler;
      if (labels_path.empty() && sc.mix_ratio < 1.0) {
        run.warn("no labels given; all walks start uniformly (mix_ratio treated as 1)");
        sc.mix_ratio = 1.0;
      }
      sc.seed = derive_seed(cfg.seed, "positives", 0);
      const WalkBatch pos = run.timed("sample", [&] { return sample_context(g, labels, sc); });
      const WalkBatch neg = cfg.negatives == NegativeScheme::unigram
                                ? unigram_negatives(pos, g.num_nodes(), sc.walks, sc.walk_length,
                                                    derive_seed(cfg.seed, "negatives"))
                                : shuffled_negatives(pos, derive_seed(cfg.seed, "negatives"));
      run.write("walks/positive.walks", [&](std::ostream& o) { write_walks(o, pos); });
      run.write("walks/negative.walks", [&](std::ostream& o) { write_walks(o, neg); });
    } else if (command == "pretrain") {
      run.input("graph", graph_path);
      run.input("walks", walks_path);
      const Graph g = load_graph(graph_path, common);
      WalkBatch corpus;
      if (walks_path.empty()) {
        SamplerConfig sc = cfg.sampler;
        sc.validate();
        sc.mix_ratio = 1.0;
        sc.walks = cfg.pretrain_walks ? cfg.pretrain_walks : cfg.sampler.walks;
        sc.seed = derive_seed(cfg.seed, "pretrain-walks");
        corpus = run.timed("sample", [&] { return sample_context(g, LabelSet(g.num_nodes(), 1), sc); });
        run.write("walks/pretrain.walks", [&](std::ostream& o) { write_walks(o, corpus); });
      } else {
        corpus = load_walks(walks_path, g);
      }
      SkipGramConfig sg = cfg.skipgram;
      sg.seed = derive_seed(cfg.seed, "skipgram");
      const auto res = run.timed("pretrain", [&] { return pretrain_embeddings(corpus, g.num_nodes(), sg); });
      if (!res.unvisited.empty()) run.warn(std::to_string(res.unvisited.size()) + " nodes never visited");
      run.write("model/embeddings.txt", [&](std::ostream& o) { write_embeddings(o, res.table, &g); });
    } else if (command == "train") {
      run.input("graph", graph_path);
      run.input("labels", labels_path);
      run.input("protected", protected_path);
      const Graph g = load_graph(graph_path, common);
      const LabelSet labels = load_labels(labels_path, g);
      const GroupMembership groups = load_protected(protected_path, g);
      const RunArtifacts art = run.timed("train", [&] { return run_training(g, labels, groups, cfg); });
      for (const auto& w : art.warnings) run.warn(w);
      run.write("model/generator.bin", [&](std::ostream& o) { save_checkpoint(o, art.generator); });
      run.write("model/embeddings.txt", [&](std::ostream& o) { write_embeddings(o, art.embeddings, &g); });
      run.write("model/start.tsv", [&](std::ostream& o) {
        write_start_distribution(o, g, start_distribution(art.positives, g.num_nodes()));
      });
      run.write("walks/positive.walks", [&](std::ostream& o) { write_walks(o, art.positives); });
      run.write("walks/negative.walks", [&](std::ostream& o) { write_walks(o, art.negatives); });
      run.write("reports/objective.csv", [&](std::ostream& o) { write_objective_report(o, art); });
      run.write("reports/generator_loss.csv", [&](std::ostream& o) {
        o << "step,loss\n";
        for (std::size_t i = 0; i < art.generator_loss.size(); ++i)
          o << i << ',' << detail::format_double(art.generator_loss[i]) << '\n';
      });
      run.write("reports/discriminator_loss.csv", [&](std::ostream& o) {
        o << "step,loss\n";
        for (std::size_t i = 0; i < art.discriminator_loss.size(); ++i)
          o << i << ',' << detail::format_double(art.discriminator_loss[i]) << '\n';
      });
      for (const auto& sp : art.history) {
        char name[64];
        std::snprintf(name, sizeof name, "reports/pseudo_labels/cycle_%03zu.tsv", sp.cycle);
        run.write(name, [&](std::ostream& o) { write_pseudo_label_audit(o, g, sp); });
      }
    } else if (command == "generate") {
      run.input("graph", graph_path);
      run.input("model", model_path);
      run.input("start", start_path);
      const Graph g = load_graph(graph_path, common);
      const GeneratorModel model = load_model(model_path);
      if (model.num_nodes() != g.num_nodes()) throw Error("model node count does not match the graph");
      const auto start = start_path.empty() ? uniform_start(g) : read_start_distribution(start_path, g);
      const std::size_t t_len = model.shape().max_length;
      const std::size_t count =
          walk_count ? walk_count
                     : (detail::ceil_count(cfg.generation_factor * static_cast<double>(g.num_edges())) + t_len - 2) /
                           (t_len - 1);
      run.parameter("count", count);
      const WalkBatch walks = run.timed("generate", [&] {
        return generate_walks(model, count, t_len, start, derive_seed(cfg.seed, "synthesis"), cfg.threads);
      });
      const ScoreMatrix b = run.timed("score", [&] { return accumulate_scores(walks, g.num_nodes(), cfg.threads); });
      run.write("walks/generated.walks", [&](std::ostream& o) { write_walks(o, walks); });
      run.write("scores/scores.txt", [&](std::ostream& o) { write_scores(o, b); });
    } else if (command == "assemble") {
      run.input("graph", graph_path);
      run.input("scores", scores_path);
      run.input("protected", protected_path);
      const Graph g = load_graph(graph_path, common);
      const ScoreMatrix b = load_scores(scores_path, g);
      const GroupMembership groups = protected_path.empty()
                                         ? GroupMembership(g.num_nodes(), std::vector<NodeId>{})
                                         : load_protected(protected_path, g);
      const auto res = run.timed("assemble", [&] { return assemble(b, g, groups, {cfg.volume_tolerance}); });
      for (const auto& w : res.warnings) run.warn(w);
      run.write("graphs/generated.edges", [&](std::ostream& o) { write_edge_list(o, res.graph); });
      const json summary = {{"edges", res.graph.num_edges()},
                            {"budget", g.num_edges()},
                            {"coverage_edges", res.coverage_edges},
                            {"protected_edges", res.protected_edges},
                            {"fill_edges", res.fill_edges},
                            {"deferred_by_volume_cap", res.capped},
                            {"original_protected_volume", res.original_protected_volume},
                            {"protected_volume", res.protected_volume},
                            {"warnings", res.warnings}};
      run.write("reports/assembly.json", [&](std::ostream& o) { o << summary.dump(2) << '\n'; });
    } else if (command == "augment") {
      run.input("graph", graph_path);
      run.input("scores", scores_path);
      run.parameter("fraction", fraction);
      const Graph g = load_graph(graph_path, common);
      const auto res = augment(load_scores(scores_path, g), g, fraction);
      for (const auto& w : res.warnings) run.warn(w);
      run.write("graphs/augmented.edges", [&](std::ostream& o) { write_edge_list(o, res.graph); });
      run.write("reports/augment.json", [&](std::ostream& o) {
        o << json{{"original_edges", g.num_edges()}, {"added", res.added}, {"edges", res.graph.num_edges()}}.dump(2)
          << '\n';
      });
    } else if (command == "evaluate") {
      run.input("graph", graph_path);
      run.input("generated", generated_path);
      run.input("protected", protected_path);
      const Graph g = load_graph(graph_path, common);
      const Graph gen = reindex_like(g, load_edge_list(generated_path, {.allow_isolated = true}));
      std::optional<GroupMembership> groups;
      if (!protected_path.empty()) groups = load_protected(protected_path, g);
      const MetricReport r =
          run.timed("evaluate", [&] { return evaluate(g, gen, groups ? &*groups : nullptr, cfg.threads); });
      run.write("reports/metrics.csv", [&](std::ostream& o) { write_report_csv(o, r); });
      run.write("reports/metrics.json", [&](std::ostream& o) { o << report_json(r).dump(2) << '\n'; });
      for (const auto& row : r.rows)
        std::cout << metric_name(row.metric) << "\tR=" << detail::format_number(row.overall.value)
                  << "\tR+=" << detail::format_number(row.protected_.value) << '\n';
    } else if (command == "baseline") {
      run.parameter("model", baseline_model);
      run.parameter("nodes", nodes);
      Graph g;
      if (baseline_model == "er") {
        if (baseline->count("--edges") == 0) throw Error("ER baseline needs --edges");
        run.parameter("edges", edges);
        g = er_generate(nodes, edges, derive_seed(cfg.seed, "baseline"));
      } else {
        std::size_t k = attach;
        if (k == 0) {
          if (edges == 0 || nodes == 0) throw Error("BA baseline needs --attach or --edges");
          k = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(static_cast<double>(edges) / static_cast<double>(nodes))));
        }
        run.parameter("attach", k);
        g = ba_generate(nodes, k, derive_seed(cfg.seed, "baseline"));
      }
      run.write("graphs/baseline.edges", [&](std::ostream& o) { write_edge_list(o, g); });
      std::cout << "nodes " << g.num_nodes() << " edges " << g.num_edges() << '\n';
    } else if (command == "lemma-check") {
      run.input("graph", graph_path);
      run.input("subset", subset_path);
      run.parameter("delta", delta);
      run.parameter("steps", steps);
      const Graph g = load_graph(graph_path, common);
      const NodeMask s = make_mask(g.num_nodes(), load_node_set(subset_path, g));
      const LemmaReport rep = run.timed("verify", [&] { return verify_lemma_bound(g, s, delta, steps); });
      if (rep.core_empty()) run.warn("the diffusion core is empty; the bound is not claimed for any node");
      run.write("reports/lemma.csv", [&](std::ostream& o) {
        o << "node,in_core,worst_ratio,min_slack,violated\n";
        for (const auto& r : rep.nodes)
          o << g.external_id(r.node) << ',' << (r.in_core ? 1 : 0) << ',' << detail::format_double(r.worst_ratio)
            << ',' << (r.in_core ? detail::format_double(r.min_slack) : std::string("nan")) << ','
            << (r.violated ? 1 : 0) << '\n';
      });
      run.write("reports/lemma.json", [&](std::ostream& o) {
        o << json{{"conductance", rep.conductance}, {"delta", rep.delta},     {"t_max", rep.t_max},
                  {"subset", rep.nodes.size()},     {"core", rep.core.size()}, {"checked", rep.checked},
                  {"violations", rep.violations}}
                 .dump(2)
          << '\n';
      });
      std::cout << "core " << rep.core.size() << " of " << rep.nodes.size() << ", violations " << rep.violations
                << '\n';
      run.commit();
      return rep.passed() ? 0 : 2;
    } else if (command == "benchmark") {
      const auto ns = parse_sweep(node_sweep, sweep_steps);
      const auto ds = parse_sweep(density_sweep, sweep_steps);
      run.parameter("nodes", node_sweep);
      run.parameter("density", density_sweep);
      run.parameter("repeats", repeats);
      cfg.validate();
      struct Point {
        std::size_t n, m;
        double density, sample, train;
      };
      std::vector<Point> points;
      for (double nd : ns)
        for (double dens : ds) {
          const auto n = static_cast<std::size_t>(std::llround(nd));
          const double pairs = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
          const auto m = static_cast<std::size_t>(std::llround(dens * pairs));
          const Graph g = er_generate(n, m, derive_seed(cfg.seed, "benchmark-graph", points.size()));
          Point p{n, m, dens, std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
          for (std::size_t rep = 0; rep < repeats; ++rep) {
            SamplerConfig sc = cfg.sampler;
            sc.mix_ratio = 1.0;
            sc.seed = derive_seed(cfg.seed, "benchmark-walks", points.size());
            const auto t0 = std::chrono::steady_clock::now();
            const WalkBatch pos = sample_context(g, LabelSet(n, 1), sc);
            const WalkBatch neg = unigram_negatives(pos, n, pos.size(), sc.walk_length,
                                                    derive_seed(cfg.seed, "benchmark-negatives", points.size()));
            const auto t1 = std::chrono::steady_clock::now();
            GeneratorModel model({n, cfg.skipgram.dim, sc.walk_length, cfg.heads, cfg.ffn},
                                 derive_seed(cfg.seed, "benchmark-model", points.size()));
            GenTrainConfig gc = cfg.gen;
            gc.epochs = 1;
            train_generator(model, pos, neg, gc);
            const auto t2 = std::chrono::steady_clock::now();
            p.sample = std::min(p.sample, std::chrono::duration<double>(t1 - t0).count());
            p.train = std::min(p.train, std::chrono::duration<double>(t2 - t1).count());
          }
          std::cerr << "n=" << n << " density=" << dens << " m=" << m << " pipeline=" << p.sample + p.train << "s\n";
          points.push_back(p);
        }
      run.write("reports/benchmark.csv", [&](std::ostream& o) {
        o << "nodes,density,edges,sample_seconds,train_seconds,pipeline_seconds\n";
        for (const auto& p : points)
          o << p.n << ',' << detail::format_double(p.density) << ',' << p.m << ',' << p.sample << ',' << p.train << ','
            << p.sample + p.train << '\n';
      });
      json fit = json::object();
      std::vector<double> x_n, x_d, x_m, y;
      for (const auto& p : points) {
        x_n.push_back(static_cast<double>(p.n));
        x_d.push_back(p.density);
        x_m.push_back(static_cast<double>(p.m));
        y.push_back(p.sample + p.train);
      }
      if (ns.size() > 1 && ds.size() == 1) fit["slope_vs_nodes"] = number_or_null(loglog_slope(x_n, y));
      if (ds.size() > 1 && ns.size() == 1) fit["slope_vs_density"] = number_or_null(loglog_slope(x_d, y));
      if (points.size() > 1) fit["slope_vs_edges"] = number_or_null(loglog_slope(x_m, y));
      run.write("reports/benchmark_fit.json", [&](std::ostream& o) { o << fit.dump(2) << '\n'; });
      std::cout << fit.dump() << '\n';
    }
    run.commit();
  } catch (const std::exception& e) {
    std::cerr << "fairgen " << command << ": error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
