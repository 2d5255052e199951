#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <string>
#include <string_view>
#include <system_error>
#include <type_traits>
#include <vector>

#include "fairgen/assembler.hpp"
#include "fairgen/embedding.hpp"
#include "fairgen/error.hpp"
#include "fairgen/fair_learner.hpp"
#include "fairgen/generator.hpp"
#include "fairgen/graph.hpp"
#include "fairgen/rng.hpp"
#include "fairgen/sampler.hpp"

namespace fairgen {

enum class NegativeScheme { unigram, shuffled };

struct TrainRunConfig {
  SamplerConfig sampler;   // walk_length T, walks K, mix_ratio r, p, q
  GenTrainConfig gen;      // mu, floor, batch size, lr
  SkipGramConfig skipgram; // dim is shared with the generator
  std::size_t pretrain_walks = 0;  // 0 = K
  std::size_t heads = 4;
  std::size_t ffn = 128;
  FairLossWeights weights;
  std::size_t disc_hidden = 64;
  double disc_learning_rate = 0.01;
  std::size_t batch_size = 128;     // N1
  std::size_t inner_iterations = 10;  // T1
  std::size_t cycles = 10;            // p
  double lambda0 = 0.105;
  double lambda_growth = 1.5;
  std::size_t epochs = 20;  // generator passes over the pools per cycle
  std::size_t pool_cap = 0;  // 0 = unbounded
  bool uniform_sampling = false;
  bool no_self_paced = false;
  bool no_parity = false;
  NegativeScheme negatives = NegativeScheme::unigram;
  double generation_factor = 20.0;  // generated transitions per original edge
  double volume_tolerance = 0.1;
  std::uint64_t seed = 0;
  unsigned threads = 1;  // not part of the config file; results do not depend on it

  void validate() const {
    sampler.validate();
    gen.validate();
    weights.validate();
    if (skipgram.dim == 0 || skipgram.dim % heads != 0) throw Error("dim must be a positive multiple of heads");
    if (sampler.walks == 0) throw Error("walks (K) must be at least 1");
    if (cycles == 0) throw Error("cycles must be at least 1");
    if (batch_size == 0) throw Error("batch_size must be at least 1");
    if (epochs == 0) throw Error("epochs must be at least 1");
    if (!(lambda0 > 0.0) || !(lambda_growth > 1.0)) throw Error("lambda0 must be positive and lambda_growth above 1");
    if (!(generation_factor > 0.0)) throw Error("generation_factor must be positive");
    if (!(volume_tolerance >= 0.0 && volume_tolerance < 1.0)) throw Error("volume_tolerance must lie in [0, 1)");
  }
};

namespace detail {

template <class T>
T parse_number(std::string_view key, std::string_view text) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw Error("config key '" + std::string(key) + "': invalid value '" + std::string(text) + "'");
  return value;
}

inline bool parse_bool(std::string_view key, std::string_view text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw Error("config key '" + std::string(key) + "': expected true or false, got '" + std::string(text) + "'");
}

/// Shortest round-trip decimal form.
inline std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

struct ConfigKey {
  std::function<void(TrainRunConfig&, std::string_view)> set;
  std::function<std::string(const TrainRunConfig&)> get;
};

template <class T>
ConfigKey number_key(std::string_view name, T TrainRunConfig::*outer) {
  return {[=](TrainRunConfig& c, std::string_view v) { c.*outer = parse_number<T>(name, v); },
          [=](const TrainRunConfig& c) {
            if constexpr (std::is_floating_point_v<T>) return format_double(c.*outer);
            else return std::to_string(c.*outer);
          }};
}

template <class Sub, class T>
ConfigKey nested_key(std::string_view name, Sub TrainRunConfig::*outer, T Sub::*inner) {
  return {[=](TrainRunConfig& c, std::string_view v) { (c.*outer).*inner = parse_number<T>(name, v); },
          [=](const TrainRunConfig& c) {
            if constexpr (std::is_floating_point_v<T>) return format_double((c.*outer).*inner);
            else return std::to_string((c.*outer).*inner);
          }};
}

inline ConfigKey bool_key(std::string_view name, bool TrainRunConfig::*field) {
  return {[=](TrainRunConfig& c, std::string_view v) { c.*field = parse_bool(name, v); },
          [=](const TrainRunConfig& c) { return std::string(c.*field ? "true" : "false"); }};
}

inline const std::map<std::string, ConfigKey, std::less<>>& config_keys() {
  using C = TrainRunConfig;
  static const std::map<std::string, ConfigKey, std::less<>> keys = [] {
    std::map<std::string, ConfigKey, std::less<>> k;
    k["walk_length"] = nested_key("walk_length", &C::sampler, &SamplerConfig::walk_length);
    k["walks"] = nested_key("walks", &C::sampler, &SamplerConfig::walks);
    k["mix_ratio"] = nested_key("mix_ratio", &C::sampler, &SamplerConfig::mix_ratio);
    k["return_param"] = nested_key("return_param", &C::sampler, &SamplerConfig::return_param);
    k["inout_param"] = nested_key("inout_param", &C::sampler, &SamplerConfig::inout_param);
    k["class_balanced"] = {[](C& c, std::string_view v) { c.sampler.class_balanced = parse_bool("class_balanced", v); },
                           [](const C& c) { return std::string(c.sampler.class_balanced ? "true" : "false"); }};
    k["negative_weight"] = nested_key("negative_weight", &C::gen, &GenTrainConfig::negative_weight);
    k["negative_floor"] = nested_key("negative_floor", &C::gen, &GenTrainConfig::negative_floor);
    k["gen_batch_size"] = nested_key("gen_batch_size", &C::gen, &GenTrainConfig::batch_size);
    k["gen_learning_rate"] = nested_key("gen_learning_rate", &C::gen, &GenTrainConfig::learning_rate);
    k["gen_max_steps"] = nested_key("gen_max_steps", &C::gen, &GenTrainConfig::max_steps);
    k["dim"] = nested_key("dim", &C::skipgram, &SkipGramConfig::dim);
    k["skipgram_window"] = nested_key("skipgram_window", &C::skipgram, &SkipGramConfig::window);
    k["skipgram_negatives"] = nested_key("skipgram_negatives", &C::skipgram, &SkipGramConfig::negatives);
    k["skipgram_epochs"] = nested_key("skipgram_epochs", &C::skipgram, &SkipGramConfig::epochs);
    k["skipgram_learning_rate"] = nested_key("skipgram_learning_rate", &C::skipgram, &SkipGramConfig::learning_rate);
    k["pretrain_walks"] = number_key("pretrain_walks", &C::pretrain_walks);
    k["heads"] = number_key("heads", &C::heads);
    k["ffn"] = number_key("ffn", &C::ffn);
    k["alpha"] = nested_key("alpha", &C::weights, &FairLossWeights::alpha);
    k["beta"] = nested_key("beta", &C::weights, &FairLossWeights::beta);
    k["gamma"] = nested_key("gamma", &C::weights, &FairLossWeights::gamma);
    k["disc_hidden"] = number_key("disc_hidden", &C::disc_hidden);
    k["disc_learning_rate"] = number_key("disc_learning_rate", &C::disc_learning_rate);
    k["batch_size"] = number_key("batch_size", &C::batch_size);
    k["inner_iterations"] = number_key("inner_iterations", &C::inner_iterations);
    k["cycles"] = number_key("cycles", &C::cycles);
    k["lambda0"] = number_key("lambda0", &C::lambda0);
    k["lambda_growth"] = number_key("lambda_growth", &C::lambda_growth);
    k["epochs"] = number_key("epochs", &C::epochs);
    k["pool_cap"] = number_key("pool_cap", &C::pool_cap);
    k["uniform_sampling"] = bool_key("uniform_sampling", &C::uniform_sampling);
    k["no_self_paced"] = bool_key("no_self_paced", &C::no_self_paced);
    k["no_parity"] = bool_key("no_parity", &C::no_parity);
    k["negatives"] = {[](C& c, std::string_view v) {
                        if (v == "unigram") {
                          c.negatives = NegativeScheme::unigram;
                        } else if (v == "shuffled") {
                          c.negatives = NegativeScheme::shuffled;
                        } else {
                          throw Error("config key 'negatives': expected unigram or shuffled");
                        }
                      },
                      [](const C& c) { return std::string(c.negatives == NegativeScheme::unigram ? "unigram" : "shuffled"); }};
    k["generation_factor"] = number_key("generation_factor", &C::generation_factor);
    k["volume_tolerance"] = number_key("volume_tolerance", &C::volume_tolerance);
    k["seed"] = number_key("seed", &C::seed);
    return k;
  }();
  return keys;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace detail

inline void apply_setting(TrainRunConfig& cfg, std::string_view key, std::string_view value) {
  const auto& keys = detail::config_keys();
  auto it = keys.find(key);
  if (it == keys.end()) throw Error("unknown config key '" + std::string(key) + "'");
  it->second.set(cfg, detail::trim(value));
}

/// "key=value" assignment as accepted on the command line.
inline void apply_assignment(TrainRunConfig& cfg, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) throw Error("expected key=value, got '" + std::string(assignment) + "'");
  apply_setting(cfg, detail::trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

/// Flat key=value text; '#' starts a comment line.
inline void read_config(std::istream& in, TrainRunConfig& cfg) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto body = detail::trim(line);
    if (body.empty() || body.front() == '#') continue;
    try {
      apply_assignment(cfg, body);
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(e.what(), lineno);
    }
  }
}

/// Every key in sorted order; reading it back reproduces the config.
inline void write_config(std::ostream& out, const TrainRunConfig& cfg) {
  for (const auto& [key, k] : detail::config_keys()) out << key << '=' << k.get(cfg) << '\n';
}

struct CycleRecord {
  std::size_t cycle = 0;
  double lambda = 0.0;
  double generator = 0.0;    // J_G on the current pools
  double prediction = 0.0;   // J_P
  double fairness = 0.0;     // J_F
  double label_prop = 0.0;   // J_L
  double self_paced = 0.0;   // J_S = -lambda * sum v
  std::size_t selected = 0;
  std::size_t pseudo_labeled = 0;
  std::size_t positive_pool = 0;
  std::size_t negative_pool = 0;

  double total() const { return generator + prediction + fairness + label_prop + self_paced; }
};

struct RunArtifacts {
  EmbeddingTable embeddings;
  GeneratorModel generator;
  Discriminator discriminator;
  SelfPacedState self_paced;
  std::vector<SelfPacedState> history;  // one per cycle, after the update
  std::vector<CycleRecord> cycles;
  std::vector<double> generator_loss;   // every generator step across cycles
  std::vector<double> discriminator_loss;
  WalkBatch positives, negatives;
  std::vector<std::string> warnings;
};

namespace detail {

inline void cap_pool(WalkBatch& pool, std::size_t cap) {
  if (cap == 0 || pool.size() <= cap) return;
  pool.walks.erase(pool.walks.begin(), pool.walks.begin() + static_cast<std::ptrdiff_t>(pool.size() - cap));
}

inline std::vector<NodeId> sample_batch(const std::vector<NodeId>& nodes, std::size_t size, Rng& rng) {
  std::vector<NodeId> pool = nodes;
  const std::size_t take = std::min(size, pool.size());
  for (std::size_t i = 0; i < take; ++i) std::swap(pool[i], pool[i + uniform_index(rng, pool.size() - i)]);
  pool.resize(take);
  std::sort(pool.begin(), pool.end());
  return pool;
}

inline std::vector<const Walk*> walk_pointers(const WalkBatch& b) {
  std::vector<const Walk*> out;
  out.reserve(b.size());
  for (const auto& w : b.walks) out.push_back(&w);
  return out;
}

}  // namespace detail

/// The learning loop: embed, initialise the discriminator and the pools,
/// then per cycle train the generator, grow both pools, raise lambda,
/// refresh the self-paced vectors and take T1 discriminator steps.
inline RunArtifacts run_training(const Graph& g, const LabelSet& labels, const GroupMembership& groups,
                                 const TrainRunConfig& cfg) {
  cfg.validate();
  const std::size_t n = g.num_nodes();
  if (labels.num_nodes() != n || groups.num_nodes() != n) throw Error("labels and groups must match the graph");
  if (!labels.covers_all_classes()) throw Error("labels must include at least one node per class");
  if (groups.protected_count() == 0 || groups.unprotected_count() == 0)
    throw Error("both the protected and unprotected groups must be non-empty");
  const std::size_t k = cfg.sampler.walks;
  const std::size_t t_len = cfg.sampler.walk_length;
  RunArtifacts art;

  // Node features from uniform-start walks.
  SamplerConfig pre = cfg.sampler;
  pre.mix_ratio = 1.0;
  pre.walks = cfg.pretrain_walks ? cfg.pretrain_walks : k;
  pre.seed = derive_seed(cfg.seed, "pretrain-walks");
  pre.threads = cfg.threads;
  SkipGramConfig sg = cfg.skipgram;
  sg.seed = derive_seed(cfg.seed, "skipgram");
  auto pretrained = pretrain_embeddings(sample_context(g, labels, pre), n, sg);
  art.embeddings = std::move(pretrained.table);
  if (!pretrained.unvisited.empty())
    art.warnings.push_back(std::to_string(pretrained.unvisited.size()) + " nodes never visited during pretraining");

  FairLossWeights weights = cfg.weights;
  if (cfg.no_parity) weights.gamma = 0.0;
  art.discriminator = Discriminator(cfg.skipgram.dim, static_cast<std::size_t>(labels.num_classes()),
                                    derive_seed(cfg.seed, "discriminator"), cfg.disc_hidden);
  art.self_paced = SelfPacedState(labels, cfg.lambda0, cfg.lambda_growth);

  auto discriminator_steps = [&](const LabelSet& pool_labels, std::size_t cycle) {
    const auto nodes = pool_labels.nodes();
    for (std::size_t t = 0; t < cfg.inner_iterations; ++t) {
      Rng rng = make_rng(derive_seed(cfg.seed, "disc-batch", cycle), "step", t);
      const auto batch = detail::sample_batch(nodes, cfg.batch_size, rng);
      const auto loss = train_discriminator_step(art.discriminator, art.embeddings, labels, groups, art.self_paced,
                                                 weights, batch, cfg.disc_learning_rate);
      art.discriminator_loss.push_back(loss.total());
    }
  };
  discriminator_steps(labels, 0);

  SamplerConfig pos_cfg = cfg.sampler;
  pos_cfg.threads = cfg.threads;
  if (cfg.uniform_sampling) pos_cfg.mix_ratio = 1.0;
  pos_cfg.seed = derive_seed(cfg.seed, "positives", 0);
  art.positives = sample_context(g, labels, pos_cfg);
  art.negatives = cfg.negatives == NegativeScheme::unigram
                      ? unigram_negatives(art.positives, n, k, t_len, derive_seed(cfg.seed, "negatives"))
                      : shuffled_negatives(art.positives, derive_seed(cfg.seed, "negatives"));

  GeneratorShape shape{n, cfg.skipgram.dim, t_len, cfg.heads, cfg.ffn};
  art.generator = GeneratorModel(shape, derive_seed(cfg.seed, "generator"), &art.embeddings);

  for (std::size_t l = 1; l <= cfg.cycles; ++l) {
    try {
      GenTrainConfig gcfg = cfg.gen;
      gcfg.epochs = cfg.epochs;
      gcfg.seed = derive_seed(cfg.seed, "generator-train", l);
      const auto trace = train_generator(art.generator, art.positives, art.negatives, gcfg);
      art.generator_loss.insert(art.generator_loss.end(), trace.loss.begin(), trace.loss.end());

      const LabelSet current = pseudo_labels(art.self_paced);
      pos_cfg.seed = derive_seed(cfg.seed, "positives", l);
      art.positives.append(sample_context(g, current, pos_cfg));
      art.negatives.append(generate_walks(art.generator, k, t_len, start_distribution(art.positives, n),
                                          derive_seed(cfg.seed, "generated", l), cfg.threads));
      detail::cap_pool(art.positives, cfg.pool_cap);
      detail::cap_pool(art.negatives, cfg.pool_cap);

      art.self_paced.advance();
      if (!cfg.no_self_paced) art.self_paced = update_self_paced(art.discriminator, art.embeddings, art.self_paced);
      const LabelSet augmented = pseudo_labels(art.self_paced);
      discriminator_steps(augmented, l);

      CycleRecord rec;
      rec.cycle = l;
      rec.lambda = art.self_paced.lambda;
      const auto pos_ptrs = detail::walk_pointers(art.positives);
      const auto neg_ptrs = detail::walk_pointers(art.negatives);
      rec.generator = generator_batch_loss(art.generator, pos_ptrs, neg_ptrs, gcfg, nullptr).first;
      std::vector<NodeId> all(n);
      std::iota(all.begin(), all.end(), NodeId{0});
      const auto truth_nodes = labels.nodes();
      const auto parts = discriminator_objective(art.discriminator, art.embeddings, labels, truth_nodes,
                                                 art.self_paced, all, groups, weights, nullptr);
      rec.prediction = parts.prediction;
      rec.fairness = parts.fairness;
      rec.label_prop = parts.label_prop;
      rec.selected = art.self_paced.selected_count();
      rec.self_paced = -art.self_paced.lambda * static_cast<double>(rec.selected);
      rec.pseudo_labeled = augmented.size() - labels.size();
      rec.positive_pool = art.positives.size();
      rec.negative_pool = art.negatives.size();
      art.cycles.push_back(rec);
      art.history.push_back(art.self_paced);
    } catch (const NumericalError& e) {
      throw NumericalError("cycle " + std::to_string(l) + ": " + e.what());
    } catch (const Error& e) {
      throw Error("cycle " + std::to_string(l) + ": " + e.what());
    }
  }
  return art;
}

/// Per-cycle CSV of the objective and its components.
inline void write_objective_report(std::ostream& out, const RunArtifacts& art) {
  out << "cycle,lambda,J_G,J_P,J_F,J_L,J_S,J,selected,pseudo_labeled,positive_pool,negative_pool\n";
  for (const auto& r : art.cycles) {
    out << r.cycle << ',' << detail::format_double(r.lambda) << ',' << detail::format_double(r.generator) << ','
        << detail::format_double(r.prediction) << ',' << detail::format_double(r.fairness) << ','
        << detail::format_double(r.label_prop) << ',' << detail::format_double(r.self_paced) << ','
        << detail::format_double(r.total()) << ',' << r.selected << ',' << r.pseudo_labeled << ','
        << r.positive_pool << ',' << r.negative_pool << '\n';
  }
}

struct SynthesisResult {
  WalkBatch walks;
  ScoreMatrix scores;
  AssembleResult assembled;
};

/// Generates about factor * m transitions from the model, counts them into
/// B and assembles the output graph.
inline SynthesisResult synthesize_graph(const GeneratorModel& model, const Graph& g, const GroupMembership& groups,
                                        const std::vector<double>& start_dist, std::size_t walk_length,
                                        double factor, double volume_tolerance, std::uint64_t seed,
                                        unsigned threads = 1) {
  if (walk_length < 2) throw Error("generated walks need length at least 2");
  const std::size_t transitions = detail::ceil_count(factor * static_cast<double>(g.num_edges()));
  const std::size_t count = (transitions + walk_length - 2) / (walk_length - 1);
  SynthesisResult out;
  out.walks = generate_walks(model, count, walk_length, start_dist, derive_seed(seed, "synthesis"), threads);
  out.scores = accumulate_scores(out.walks, g.num_nodes(), threads);
  out.assembled = assemble(out.scores, g, groups, {volume_tolerance});
  return out;
}

}  // namespace fairgen
