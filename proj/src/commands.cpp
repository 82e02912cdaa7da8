#include "peloton/commands.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>

#include "peloton/analysis.hpp"
#include "peloton/csv.hpp"
#include "peloton/embedding_io.hpp"
#include "peloton/errors.hpp"

namespace fs = std::filesystem;

namespace peloton {

namespace {

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return in;
}

// Files are written under a temporary name and renamed only once every file
// of the command succeeded; anything else is deleted.
class OutputFiles {
 public:
  std::ofstream open(const fs::path& final_path) {
    const fs::path tmp = final_path.string() + ".partial";
    pending_.push_back({tmp, final_path});
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + final_path.string());
    return out;
  }

  void close(std::ofstream& out, const fs::path& final_path) {
    out.close();
    if (!out) throw std::runtime_error("failed writing " + final_path.string());
  }

  void commit() {
    for (const auto& [tmp, final_path] : pending_) {
      fs::rename(tmp, final_path);
      committed_.push_back(final_path);
    }
    pending_.clear();
    committed_.clear();
  }

  ~OutputFiles() {
    std::error_code ec;
    for (const auto& [tmp, final_path] : pending_) fs::remove(tmp, ec);
    for (const auto& path : committed_) fs::remove(path, ec);
  }

 private:
  std::vector<std::pair<fs::path, fs::path>> pending_;
  std::vector<fs::path> committed_;
};

template <typename Fn>
void write_file(OutputFiles& files, const fs::path& path, Fn&& body) {
  auto out = files.open(path);
  body(out);
  files.close(out, path);
}

nlohmann::ordered_json summary_json(const IngestionSummary& s) {
  return {{"rows_read", s.rows_read},
          {"rows_filtered", s.rows_filtered},
          {"editions_dropped_zero_winner", s.editions_dropped_zero_winner},
          {"riders_indexed", s.riders_indexed},
          {"races_indexed", s.races_indexed},
          {"examples", s.examples}};
}

int run_training(const fs::path& results, const fs::path& output_dir, const TrainOptions& options,
                 const std::optional<std::string>& expected_digest, std::ostream& out,
                 std::ostream& err) {
  options.config.validate();
  const std::string digest = file_digest(results);
  if (expected_digest && *expected_digest != digest) {
    err << "results file digest " << digest << " does not match manifest digest "
        << *expected_digest << '\n';
    return kExitFailure;
  }

  auto in = open_input(results);
  const Dataset data = ingest(in, options.min_rider_points);
  out << format_summary(data.summary);
  if (data.examples.empty()) {
    err << "no training examples\n";
    return kExitFailure;
  }

  const TrainResult trained = train(data.examples, data.index, options.config);

  RunManifest manifest;
  manifest.config = options.config;
  manifest.min_rider_points = options.min_rider_points;
  manifest.input_name = results.filename().string();
  manifest.input_digest = digest;
  manifest.summary = data.summary;

  fs::create_directories(output_dir);
  OutputFiles files;
  write_file(files, output_dir / "embeddings.csv",
             [&](std::ostream& o) { write_embeddings(o, trained.embeddings); });
  write_file(files, output_dir / "loss_history.csv",
             [&](std::ostream& o) { write_loss_history(o, trained.loss_history); });
  write_file(files, output_dir / "manifest.json",
             [&](std::ostream& o) { o << manifest_to_json(manifest); });
  files.commit();

  out << "initial_loss=" << csv::format_double(trained.loss_history.front()) << '\n'
      << "final_loss=" << csv::format_double(trained.loss_history.back()) << '\n';
  return kExitOk;
}

EmbeddingSet load_embeddings(const fs::path& path) {
  auto in = open_input(path);
  try {
    return read_embeddings(in);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_pca(std::ostream& o, const PcaResult& pca, const std::vector<std::string>& keys,
               const std::vector<std::string>& colors) {
  o << "entity_key,pc1,pc2,color\n";
  for (std::size_t i = 0; i < keys.size(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    o << csv::escape(keys[i]) << ',' << csv::format_double(pca.projections(row, 0)) << ',';
    if (pca.projections.cols() > 1) o << csv::format_double(pca.projections(row, 1));
    o << ',' << csv::escape(colors[i]) << '\n';
  }
}

PcaResult project_for_plot(const Matrix& m, std::string_view what) {
  if (m.rows() < 2) {
    throw UsageError("PCA needs at least two " + std::string(what) + " embeddings");
  }
  return pca_project(m, std::min<std::size_t>(2, static_cast<std::size_t>(m.cols())));
}

}  // namespace

std::string format_probability(double p) {
  std::ostringstream out;
  out << std::setprecision(15) << p;
  const double shown = std::strtod(out.str().c_str(), nullptr);
  if (shown > 0.0 && shown < 1.0) return out.str();
  return csv::format_double(p);
}

std::string file_digest(const fs::path& path) {
  auto in = open_input(path);
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 unavailable");
  }
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md, &len);
  std::ostringstream hex;
  hex << "sha256:" << std::hex << std::setfill('0');
  for (unsigned int i = 0; i < len; ++i) hex << std::setw(2) << static_cast<int>(md[i]);
  return hex.str();
}

std::string manifest_to_json(const RunManifest& m) {
  nlohmann::ordered_json j;
  j["tool"] = "peloton";
  j["tool_version"] = m.tool_version;
  j["input"] = {{"name", m.input_name}, {"digest", m.input_digest}};
  j["config"] = {{"dim", m.config.dim},
                 {"learning_rate", m.config.learning_rate},
                 {"epochs", m.config.epochs},
                 {"seed", m.config.seed},
                 {"optimizer", "adam"},
                 {"batching", "full"},
                 {"beta1", m.config.beta1},
                 {"beta2", m.config.beta2},
                 {"adam_epsilon", m.config.adam_epsilon},
                 {"init_scale", m.config.init_scale},
                 {"min_rider_points", m.min_rider_points}};
  j["ingestion"] = summary_json(m.summary);
  return j.dump(2) + "\n";
}

RunManifest manifest_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("manifest is not valid JSON: ") + e.what());
  }
  try {
    RunManifest m;
    m.tool_version = j.at("tool_version").get<std::string>();
    m.input_name = j.at("input").at("name").get<std::string>();
    m.input_digest = j.at("input").at("digest").get<std::string>();
    const auto& c = j.at("config");
    if (c.at("optimizer") != "adam" || c.at("batching") != "full") {
      throw FormatError("manifest describes an unsupported optimizer setup");
    }
    m.config.dim = c.at("dim").get<std::size_t>();
    m.config.learning_rate = c.at("learning_rate").get<double>();
    m.config.epochs = c.at("epochs").get<std::size_t>();
    m.config.seed = c.at("seed").get<std::uint64_t>();
    m.config.beta1 = c.at("beta1").get<double>();
    m.config.beta2 = c.at("beta2").get<double>();
    m.config.adam_epsilon = c.at("adam_epsilon").get<double>();
    m.config.init_scale = c.at("init_scale").get<double>();
    m.min_rider_points = c.at("min_rider_points").get<double>();
    const auto& s = j.at("ingestion");
    m.summary.rows_read = s.at("rows_read").get<std::size_t>();
    m.summary.rows_filtered = s.at("rows_filtered").get<std::size_t>();
    m.summary.editions_dropped_zero_winner = s.at("editions_dropped_zero_winner").get<std::size_t>();
    m.summary.riders_indexed = s.at("riders_indexed").get<std::size_t>();
    m.summary.races_indexed = s.at("races_indexed").get<std::size_t>();
    m.summary.examples = s.at("examples").get<std::size_t>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("manifest is missing fields: ") + e.what());
  }
}

int cmd_train(const fs::path& results, const fs::path& output_dir, const TrainOptions& options,
              std::ostream& out, std::ostream& err) {
  return run_training(results, output_dir, options, std::nullopt, out, err);
}

int cmd_train_from_manifest(const fs::path& results, const fs::path& output_dir,
                            const fs::path& manifest_path, std::ostream& out, std::ostream& err) {
  auto in = open_input(manifest_path);
  std::stringstream text;
  text << in.rdbuf();
  const RunManifest manifest = manifest_from_json(text.str());
  TrainOptions options{manifest.config, manifest.min_rider_points};
  return run_training(results, output_dir, options, manifest.input_digest, out, err);
}

int cmd_analyze(const fs::path& embeddings_path, const AnalyzeOptions& options, std::ostream& out,
                std::ostream&) {
  const EmbeddingSet e = load_embeddings(embeddings_path);
  if (options.k == 0) throw UsageError("--k must be at least 1");

  std::map<std::string, std::optional<double>> profiles;
  if (options.profile_scores) {
    auto in = open_input(*options.profile_scores);
    profiles = race_profile_scores(filter_rows(parse_results(in)));
  }

  const ClusterResult clusters = kmeans(e.riders, options.k, options.seed);
  const PcaResult rider_pca = project_for_plot(e.riders, "rider");
  const PcaResult race_pca = project_for_plot(e.races, "race");

  std::vector<std::string> rider_keys, rider_colors, race_keys, race_colors;
  for (std::size_t i = 0; i < e.index.rider_count(); ++i) {
    rider_keys.push_back(e.index.rider_key(i));
    rider_colors.push_back(std::to_string(clusters.assignments[i]));
  }
  for (std::size_t i = 0; i < e.index.race_count(); ++i) {
    race_keys.push_back(e.index.race_key(i));
    const auto it = profiles.find(race_keys.back());
    race_colors.push_back(it != profiles.end() && it->second ? csv::format_double(*it->second)
                                                             : std::string());
  }

  const fs::path dir = options.output_dir.value_or(embeddings_path.parent_path());
  if (!dir.empty()) fs::create_directories(dir);
  OutputFiles files;
  write_file(files, dir / "rider_pca.csv",
             [&](std::ostream& o) { write_pca(o, rider_pca, rider_keys, rider_colors); });
  write_file(files, dir / "race_pca.csv",
             [&](std::ostream& o) { write_pca(o, race_pca, race_keys, race_colors); });
  write_file(files, dir / "clusters.csv", [&](std::ostream& o) {
    o << "entity_key,cluster\n";
    for (std::size_t i = 0; i < rider_keys.size(); ++i) {
      o << csv::escape(rider_keys[i]) << ',' << clusters.assignments[i] << '\n';
    }
  });
  files.commit();

  out << "k=" << options.k << '\n'
      << "inertia=" << csv::format_double(clusters.inertia) << '\n'
      << "iterations=" << clusters.iterations << '\n';
  return kExitOk;
}

int cmd_similar(const fs::path& embeddings_path, const std::string& query_key, std::size_t count,
                std::ostream& out, std::ostream& err) {
  const EmbeddingSet e = load_embeddings(embeddings_path);
  std::vector<Neighbor> neighbors;
  try {
    neighbors = nearest_neighbors(query_key, e, count);
  } catch (const LookupError& ex) {
    err << ex.what() << '\n';
    const auto near = near_miss_keys(query_key, e);
    if (!near.empty()) {
      err << "closest keys:\n";
      for (const auto& key : near) err << "  " << key << '\n';
    }
    return kExitFailure;
  }
  out << "rank,entity_key,distance\n";
  for (std::size_t i = 0; i < neighbors.size(); ++i) {
    out << i + 1 << ',' << csv::escape(neighbors[i].key) << ','
        << csv::format_double(neighbors[i].distance) << '\n';
  }
  return kExitOk;
}

int cmd_predict(const fs::path& embeddings_path, const std::string& rider_key,
                const std::string& race_key, std::ostream& out, std::ostream& err) {
  const EmbeddingSet e = load_embeddings(embeddings_path);
  const auto rider_id = parse_rider_entity_key(rider_key);
  const auto rider = rider_id ? e.index.find_rider(*rider_id) : std::nullopt;
  if (!rider) {
    err << LookupError(rider_key).what() << '\n';
    return kExitFailure;
  }
  const auto race_id = parse_race_entity_key(race_key);
  const auto race = race_id ? e.index.find_race(*race_id) : std::nullopt;
  if (!race) {
    err << LookupError(race_key).what() << '\n';
    return kExitFailure;
  }
  const auto d = e.dim();
  const double p = predict({e.riders.data() + *rider * d, d}, {e.races.data() + *race * d, d});
  out << format_probability(p) << '\n';
  return kExitOk;
}

int cmd_ingest_check(const fs::path& results, double min_rider_points, std::ostream& out,
                     std::ostream&) {
  auto in = open_input(results);
  out << format_summary(ingest(in, min_rider_points).summary);
  return kExitOk;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rider and race embeddings learned from race results."};
  app.require_subcommand(1);

  TrainOptions train_opts;
  std::string results_path, output_dir, manifest_path;
  auto* train_cmd = app.add_subcommand(
      "train",
      "Train embeddings with Adam on full-batch binary cross-entropy. Defaults follow the "
      "reference setup: D=5, lr=0.001, 100 epochs.");
  train_cmd->add_option("results", results_path, "Results CSV")->required();
  train_cmd->add_option("output_dir", output_dir, "Directory for embeddings, loss and manifest")
      ->required();
  train_cmd->add_option("--dim", train_opts.config.dim, "Embedding dimension")
      ->capture_default_str();
  train_cmd->add_option("--lr", train_opts.config.learning_rate, "Adam learning rate")
      ->capture_default_str();
  train_cmd->add_option("--epochs", train_opts.config.epochs, "Full-batch epochs")
      ->capture_default_str();
  train_cmd->add_option("--seed", train_opts.config.seed, "Initialization seed")
      ->capture_default_str();
  train_cmd->add_option("--min-rider-points", train_opts.min_rider_points,
                        "Minimum total raw points for a rider to get an embedding")
      ->capture_default_str();
  auto* from_manifest = train_cmd->add_option(
      "--from-manifest", manifest_path, "Reuse the configuration recorded in a manifest.json");
  for (const char* flag : {"--dim", "--lr", "--epochs", "--seed", "--min-rider-points"}) {
    from_manifest->excludes(flag);
  }

  AnalyzeOptions analyze_opts;
  std::string embeddings_path, profile_path, analyze_dir;
  auto* analyze_cmd = app.add_subcommand(
      "analyze", "PCA projections of riders and races plus k-means clusters of riders");
  analyze_cmd->add_option("embeddings", embeddings_path, "embeddings.csv")->required();
  analyze_cmd->add_option("--k", analyze_opts.k, "Number of rider clusters")->capture_default_str();
  analyze_cmd->add_option("--seed", analyze_opts.seed, "k-means seed")->capture_default_str();
  analyze_cmd->add_option("--profile-scores", profile_path,
                          "Results CSV whose profile_score column colours race projections");
  analyze_cmd->add_option("--output-dir", analyze_dir,
                          "Output directory (default: next to the embeddings file)");

  std::string query_key;
  std::size_t count = 10;
  auto* similar_cmd = app.add_subcommand("similar", "Nearest entities by Euclidean distance");
  similar_cmd->add_option("embeddings", embeddings_path, "embeddings.csv")->required();
  similar_cmd->add_option("query_key", query_key, "e.g. rider:<id>")->required();
  similar_cmd->add_option("--count", count, "Number of neighbours")->capture_default_str();

  std::string rider_key, race_key;
  auto* predict_cmd = app.add_subcommand("predict", "sigmoid(rider . race) for one pair");
  predict_cmd->add_option("embeddings", embeddings_path, "embeddings.csv")->required();
  predict_cmd->add_option("rider_key", rider_key, "rider:<id>")->required();
  predict_cmd->add_option("race_key", race_key, "race:oneday:<id> or race:stage:<id>:<season>:<stage>")
      ->required();

  double check_points = kDefaultMinRiderPoints;
  auto* check_cmd = app.add_subcommand("ingest-check", "Print the ingestion summary only");
  check_cmd->add_option("results", results_path, "Results CSV")->required();
  check_cmd->add_option("--min-rider-points", check_points,
                        "Minimum total raw points for a rider to get an embedding")
      ->capture_default_str();

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (*train_cmd) {
      if (!manifest_path.empty()) {
        return cmd_train_from_manifest(results_path, output_dir, manifest_path, out, err);
      }
      return cmd_train(results_path, output_dir, train_opts, out, err);
    }
    if (*analyze_cmd) {
      if (!profile_path.empty()) analyze_opts.profile_scores = profile_path;
      if (!analyze_dir.empty()) analyze_opts.output_dir = analyze_dir;
      return cmd_analyze(embeddings_path, analyze_opts, out, err);
    }
    if (*similar_cmd) return cmd_similar(embeddings_path, query_key, count, out, err);
    if (*predict_cmd) return cmd_predict(embeddings_path, rider_key, race_key, out, err);
    if (*check_cmd) return cmd_ingest_check(results_path, check_points, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace peloton
