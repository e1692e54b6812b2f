// Command-line front end for the embedding pipeline: `embed` runs the full
// pipeline and writes an embedding file plus a run manifest, `eval` hosts the
// reconstruction / link-prediction / degree-distribution protocols, and `ppr`
// exposes single-target backward-push queries for debugging.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "strap/strap.hpp"

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

strap::GraphKind parse_kind(bool directed, bool undirected) {
  if (directed == undirected) {
    throw UsageError("exactly one of --directed / --undirected is required");
  }
  return directed ? strap::GraphKind::directed : strap::GraphKind::undirected;
}

std::string format_value(double v) {
  std::ostringstream out;
  out.precision(12);
  out << v;
  return out.str();
}

struct EmbedArgs {
  std::string input;
  std::string output;
  bool directed = false;
  bool undirected = false;
  strap::StrapConfig config;
  int threads = 0;
};

void add_config_options(CLI::App* cmd, strap::StrapConfig& config, int& threads) {
  cmd->add_option("--alpha", config.alpha, "Decay factor in (0,1)")->capture_default_str();
  cmd->add_option("--eps", config.eps, "Error parameter in (0,1)")->capture_default_str();
  cmd->add_option("--dim", config.dim, "Embedding dimension")->capture_default_str();
  cmd->add_option("--seed", config.seed, "RNG seed")->capture_default_str();
  cmd->add_option("--oversample", config.svd_oversample, "SVD oversampling columns")
      ->capture_default_str();
  cmd->add_option("--power-iters", config.svd_power_iters, "SVD power iterations")
      ->capture_default_str();
  cmd->add_option("--threads", threads, "Worker threads (0 = hardware default)")
      ->capture_default_str();
}

void check_config_flags(const strap::StrapConfig& config) {
  try {
    config.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

int run_embed(const EmbedArgs& args) {
  const strap::GraphKind kind = parse_kind(args.directed, args.undirected);
  check_config_flags(args.config);
  const auto wall_start = std::chrono::steady_clock::now();
  const strap::LoadedGraph loaded = strap::load_edge_list(args.input, kind);
  const strap::Graph& g = loaded.graph;

  const strap::EmbedResult result = strap::embed_graph(g, args.config, args.threads);

  {
    std::ofstream out(args.output);
    if (!out) throw std::runtime_error("cannot open output file: " + args.output);
    strap::write_embeddings(result.embeddings, loaded.original_ids, out);
  }

  strap::RunManifest manifest;
  manifest.set("input", args.input);
  manifest.set("kind", kind == strap::GraphKind::directed ? "directed" : "undirected");
  manifest.set("alpha", format_value(args.config.alpha));
  manifest.set("eps", format_value(args.config.eps));
  manifest.set("dim", std::to_string(args.config.dim));
  manifest.set("seed", std::to_string(args.config.seed));
  manifest.set("svd_oversample", std::to_string(args.config.svd_oversample));
  manifest.set("svd_power_iters", std::to_string(args.config.svd_power_iters));
  manifest.set("threads", std::to_string(args.threads));
  manifest.set("n", std::to_string(g.num_nodes()));
  manifest.set("m", std::to_string(g.num_arcs()));
  manifest.set("proximity_nnz", std::to_string(result.proximity_nnz));
  manifest.set("seconds_push_g", format_value(result.timings.push_g_seconds));
  manifest.set("seconds_push_gt", format_value(result.timings.push_gt_seconds));
  manifest.set("seconds_transform", format_value(result.timings.transform_seconds));
  manifest.set("seconds_svd", format_value(result.timings.svd_seconds));
  manifest.set("seconds_total", format_value(std::chrono::duration<double>(
                                                 std::chrono::steady_clock::now() - wall_start)
                                                 .count()));
  manifest.set("embeddings", args.output);
  {
    const std::string path = args.output + ".manifest";
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open manifest file: " + path);
    manifest.write(out);
  }
  return 0;
}

struct EvalCommon {
  std::string input;
  bool directed = false;
  bool undirected = false;
  std::string embeddings;
  std::string outdir = ".";
  int threads = 0;
};

// Maps the embedding rows (keyed by original id) onto the graph's dense ids.
strap::EmbeddingPair align_embeddings(const strap::LoadedGraph& loaded,
                                      const strap::ReadEmbeddings& read) {
  const strap::Graph& g = loaded.graph;
  if (read.original_ids.size() != g.num_nodes()) {
    throw std::runtime_error("embedding file has " + std::to_string(read.original_ids.size()) +
                             " nodes but graph has " + std::to_string(g.num_nodes()));
  }
  strap::EmbeddingPair aligned = read.embeddings;
  std::vector<bool> filled(g.num_nodes(), false);
  for (std::size_t row = 0; row < read.original_ids.size(); ++row) {
    const std::uint64_t orig = read.original_ids[row];
    const auto it = std::lower_bound(loaded.original_ids.begin(), loaded.original_ids.end(), orig);
    if (it == loaded.original_ids.end() || *it != orig) {
      throw std::runtime_error("embedding row id " + std::to_string(orig) + " not present in graph");
    }
    const auto dense = static_cast<Eigen::Index>(it - loaded.original_ids.begin());
    if (filled[static_cast<std::size_t>(dense)]) {
      throw std::runtime_error("embedding file repeats node id " + std::to_string(orig));
    }
    filled[static_cast<std::size_t>(dense)] = true;
    aligned.source.row(dense) = read.embeddings.source.row(static_cast<Eigen::Index>(row));
    aligned.target.row(dense) = read.embeddings.target.row(static_cast<Eigen::Index>(row));
  }
  return aligned;
}

// Recovers the run fingerprint from the embedding's manifest sidecar when
// present, so metric files from parameter sweeps do not clobber each other.
std::string fingerprint_for(const std::string& embeddings_path, int dim) {
  const std::string manifest_path = embeddings_path + ".manifest";
  std::ifstream in(manifest_path);
  if (in) {
    try {
      const strap::RunManifest m = strap::RunManifest::parse(in);
      return "a" + m.at("alpha") + "_e" + m.at("eps") + "_d" + m.at("dim") + "_s" + m.at("seed");
    } catch (const std::exception&) {
      // fall through to the dimension-only tag
    }
  }
  return "d" + std::to_string(dim);
}

void write_metric_file(const std::filesystem::path& path, const std::string& metric,
                       double value) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open metric file: " + path.string());
  out << metric << '\t' << format_value(value) << '\n';
}

void write_histogram_file(const std::filesystem::path& path,
                          const std::map<strap::NodeId, strap::NodeId>& hist) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open histogram file: " + path.string());
  for (const auto& [degree, count] : hist) out << degree << '\t' << count << '\n';
}

int run_eval_reconstruct(const EvalCommon& args) {
  const strap::GraphKind kind = parse_kind(args.directed, args.undirected);
  const strap::LoadedGraph loaded = strap::load_edge_list(args.input, kind);

  std::ifstream in(args.embeddings);
  if (!in) throw std::runtime_error("cannot open embeddings: " + args.embeddings);
  const strap::ReadEmbeddings read = strap::read_embeddings(in);
  const strap::EmbeddingPair emb = align_embeddings(loaded, read);

  const double precision = strap::reconstruction_precision(loaded.graph, emb, args.threads);
  std::cout << "reconstruction_precision\t" << format_value(precision) << '\n';

  const std::string fp = fingerprint_for(args.embeddings, emb.dim);
  write_metric_file(std::filesystem::path(args.outdir) / ("reconstruction_" + fp + ".tsv"),
                    "reconstruction_precision", precision);
  return 0;
}

struct LinkpredArgs {
  EvalCommon common;
  strap::StrapConfig config;
  double ratio = 0.5;
  int repeats = 1;
};

int run_eval_linkpred(const LinkpredArgs& args) {
  const strap::GraphKind kind = parse_kind(args.common.directed, args.common.undirected);
  check_config_flags(args.config);
  if (args.repeats < 1) throw UsageError("--repeats must be >= 1");
  if (!(args.ratio > 0.0 && args.ratio < 1.0)) throw UsageError("--ratio must be in (0,1)");
  const strap::LoadedGraph loaded = strap::load_edge_list(args.common.input, kind);

  std::vector<double> precisions;
  precisions.reserve(static_cast<std::size_t>(args.repeats));
  for (int r = 0; r < args.repeats; ++r) {
    precisions.push_back(strap::link_prediction_precision(
        loaded.graph, args.config, args.ratio, args.config.seed + static_cast<std::uint64_t>(r),
        args.common.threads));
  }
  double mean = 0.0;
  for (double p : precisions) mean += p;
  mean /= static_cast<double>(precisions.size());
  double stddev = 0.0;
  if (precisions.size() > 1) {
    double ss = 0.0;
    for (double p : precisions) ss += (p - mean) * (p - mean);
    stddev = std::sqrt(ss / static_cast<double>(precisions.size() - 1));
  }

  std::cout << "link_prediction_precision\t" << format_value(mean) << '\n';
  if (args.repeats > 1) {
    std::cout << "link_prediction_precision_stddev\t" << format_value(stddev) << '\n';
  }

  const std::string fp = args.config.fingerprint();
  const std::filesystem::path path =
      std::filesystem::path(args.common.outdir) / ("linkpred_" + fp + ".tsv");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open metric file: " + path.string());
  for (std::size_t r = 0; r < precisions.size(); ++r) {
    out << args.config.seed + r << '\t' << format_value(precisions[r]) << '\n';
  }
  return 0;
}

int run_eval_degdist(const EvalCommon& args) {
  const strap::GraphKind kind = parse_kind(args.directed, args.undirected);
  const strap::LoadedGraph loaded = strap::load_edge_list(args.input, kind);

  std::ifstream in(args.embeddings);
  if (!in) throw std::runtime_error("cannot open embeddings: " + args.embeddings);
  const strap::ReadEmbeddings read = strap::read_embeddings(in);
  const strap::EmbeddingPair emb = align_embeddings(loaded, read);

  const strap::Graph recon = strap::reconstruct_graph(loaded.graph, emb, args.threads);
  const auto orig_in = strap::degree_histogram(loaded.graph, strap::Direction::in);
  const auto orig_out = strap::degree_histogram(loaded.graph, strap::Direction::out);
  const auto recon_in = strap::degree_histogram(recon, strap::Direction::in);
  const auto recon_out = strap::degree_histogram(recon, strap::Direction::out);

  const std::string fp = fingerprint_for(args.embeddings, emb.dim);
  const std::filesystem::path dir(args.outdir);
  write_histogram_file(dir / ("degdist_orig_in_" + fp + ".tsv"), orig_in);
  write_histogram_file(dir / ("degdist_orig_out_" + fp + ".tsv"), orig_out);
  write_histogram_file(dir / ("degdist_recon_in_" + fp + ".tsv"), recon_in);
  write_histogram_file(dir / ("degdist_recon_out_" + fp + ".tsv"), recon_out);

  const auto orig_out_deg = strap::out_degree_values(loaded.graph);
  const auto recon_out_deg = strap::out_degree_values(recon);
  const auto orig_in_deg = strap::in_degree_values(loaded.graph);
  const auto recon_in_deg = strap::in_degree_values(recon);
  std::cout << "degree_spearman_out\t" << format_value(strap::spearman(orig_out_deg, recon_out_deg))
            << '\n';
  std::cout << "degree_spearman_in\t" << format_value(strap::spearman(orig_in_deg, recon_in_deg))
            << '\n';
  return 0;
}

struct PprArgs {
  std::string input;
  bool directed = false;
  bool undirected = false;
  std::uint64_t target = 0;
  double alpha = 0.5;
  double r_max = 1e-6;
  bool oracle = false;
};

int run_ppr(const PprArgs& args) {
  const strap::GraphKind kind = parse_kind(args.directed, args.undirected);
  const strap::LoadedGraph loaded = strap::load_edge_list(args.input, kind);
  const auto& ids = loaded.original_ids;
  const auto it = std::lower_bound(ids.begin(), ids.end(), args.target);
  if (it == ids.end() || *it != args.target) {
    throw std::runtime_error("target node " + std::to_string(args.target) + " not in graph");
  }
  const auto dense = static_cast<strap::NodeId>(it - ids.begin());

  const strap::PushResult result =
      strap::backward_push(loaded.graph, dense, strap::PprParams{args.alpha, args.r_max});

  std::vector<double> exact;
  if (args.oracle) {
    exact = strap::exact_ppr_column(loaded.graph, dense, args.alpha, 1e-12);
  }

  std::cout.precision(12);
  double max_dev = 0.0;
  for (const auto& [u, pi] : result.reserves) {
    std::cout << ids[u] << '\t' << pi;
    if (args.oracle) {
      std::cout << '\t' << exact[u];
      max_dev = std::max(max_dev, std::abs(exact[u] - pi));
    }
    std::cout << '\n';
  }
  if (args.oracle) {
    // zero reserves still claim PPR <= r_max; fold them into the deviation
    std::size_t k = 0;
    for (strap::NodeId u = 0; u < loaded.graph.num_nodes(); ++u) {
      while (k < result.reserves.size() && result.reserves[k].first < u) ++k;
      const bool has = k < result.reserves.size() && result.reserves[k].first == u;
      if (!has) max_dev = std::max(max_dev, exact[u]);
    }
    std::cout << "max_abs_deviation\t" << max_dev << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"STRAP graph embeddings: sparse transpose-proximity factorization"};
  app.require_subcommand(1);

  EmbedArgs embed_args;
  CLI::App* embed = app.add_subcommand("embed", "Compute embeddings for an edge-list graph");
  embed->add_option("--input", embed_args.input, "Edge-list file")->required();
  embed->add_flag("--directed", embed_args.directed, "Treat input as directed");
  embed->add_flag("--undirected", embed_args.undirected, "Treat input as undirected");
  embed->add_option("--output", embed_args.output, "Embedding output file")->required();
  add_config_options(embed, embed_args.config, embed_args.threads);

  CLI::App* eval = app.add_subcommand("eval", "Evaluation protocols");
  eval->require_subcommand(1);

  EvalCommon recon_args;
  CLI::App* reconstruct = eval->add_subcommand("reconstruct", "Graph reconstruction precision");
  reconstruct->add_option("--input", recon_args.input, "Edge-list file")->required();
  reconstruct->add_flag("--directed", recon_args.directed, "Treat input as directed");
  reconstruct->add_flag("--undirected", recon_args.undirected, "Treat input as undirected");
  reconstruct->add_option("--embeddings", recon_args.embeddings, "Embedding file")->required();
  reconstruct->add_option("--outdir", recon_args.outdir, "Metric output directory")
      ->capture_default_str();
  reconstruct->add_option("--threads", recon_args.threads, "Worker threads")->capture_default_str();

  LinkpredArgs linkpred_args;
  CLI::App* linkpred = eval->add_subcommand("linkpred", "Link prediction precision");
  linkpred->add_option("--input", linkpred_args.common.input, "Edge-list file")->required();
  linkpred->add_flag("--directed", linkpred_args.common.directed, "Treat input as directed");
  linkpred->add_flag("--undirected", linkpred_args.common.undirected, "Treat input as undirected");
  linkpred->add_option("--ratio", linkpred_args.ratio, "Training edge fraction")
      ->capture_default_str();
  linkpred->add_option("--repeats", linkpred_args.repeats, "Runs averaged over seeds seed..seed+r-1")
      ->capture_default_str();
  linkpred->add_option("--outdir", linkpred_args.common.outdir, "Metric output directory")
      ->capture_default_str();
  add_config_options(linkpred, linkpred_args.config, linkpred_args.common.threads);

  EvalCommon degdist_args;
  CLI::App* degdist = eval->add_subcommand("degdist", "Degree distribution preservation");
  degdist->add_option("--input", degdist_args.input, "Edge-list file")->required();
  degdist->add_flag("--directed", degdist_args.directed, "Treat input as directed");
  degdist->add_flag("--undirected", degdist_args.undirected, "Treat input as undirected");
  degdist->add_option("--embeddings", degdist_args.embeddings, "Embedding file")->required();
  degdist->add_option("--outdir", degdist_args.outdir, "Histogram output directory")
      ->capture_default_str();
  degdist->add_option("--threads", degdist_args.threads, "Worker threads")->capture_default_str();

  PprArgs ppr_args;
  CLI::App* ppr = app.add_subcommand("ppr", "Backward-push reserves toward a target node");
  ppr->add_option("--input", ppr_args.input, "Edge-list file")->required();
  ppr->add_flag("--directed", ppr_args.directed, "Treat input as directed");
  ppr->add_flag("--undirected", ppr_args.undirected, "Treat input as undirected");
  ppr->add_option("--target", ppr_args.target, "Target node (original id)")->required();
  ppr->add_option("--alpha", ppr_args.alpha, "Decay factor")->capture_default_str();
  ppr->add_option("--rmax", ppr_args.r_max, "Push threshold")->capture_default_str();
  ppr->add_flag("--oracle", ppr_args.oracle, "Also print exact values and max deviation");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp") {
      return app.exit(e);
    }
    std::cerr << e.what() << "\nRun with --help for usage.\n";
    return 2;
  }

  try {
    if (*embed) return run_embed(embed_args);
    if (*reconstruct) return run_eval_reconstruct(recon_args);
    if (*linkpred) return run_eval_linkpred(linkpred_args);
    if (*degdist) return run_eval_degdist(degdist_args);
    if (*ppr) return run_ppr(ppr_args);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\nRun with --help for usage.\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
