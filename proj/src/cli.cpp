#include "qts/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>
#include <span>

#include "qts/csv.hpp"
#include "qts/encoding.hpp"
#include "qts/error.hpp"
#include "qts/forecast.hpp"
#include "qts/preprocess.hpp"
#include "qts/spectral.hpp"
#include "qts/statevec.hpp"

namespace qts::cli {

namespace {

using ordered_json = nlohmann::ordered_json;

// Parameter problems detected after flag parsing; always name the flag so
// the message is actionable. Mapped to exit code 2.
struct FlagError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string command;
  std::string input;
  std::string output;
  std::string time_col;
  std::vector<std::string> value_cols;
  double alpha = 0.5;
  std::size_t k = 2;
  std::size_t s = 1;
  std::size_t keep = 0;
  std::size_t p = 1;
  std::size_t d = 0;
  std::size_t q = 0;
  int layers = 0;
  std::string input_form = "two-register";
  std::string strategy = "stacked";
  std::uint64_t shots = 0;
  std::uint64_t seed = 0;
  std::size_t horizon = 1;
  std::size_t max_iters = 200;
  std::string optimizer = "spsa";
  bool pretty = false;

  bool has_d = false;
  bool has_s = false;
  bool has_keep = false;
  bool has_shots = false;
  bool has_time_col = false;
};

std::size_t padded_dim(std::size_t n) {
  std::size_t dim = 1;
  while (dim < n) dim <<= 1;
  return dim;
}

ordered_json amps_json(std::span<const cdouble> amps) {
  ordered_json arr = ordered_json::array();
  for (const auto& c : amps) arr.push_back(ordered_json{{"re", c.real()}, {"im", c.imag()}});
  return arr;
}

ordered_json reals_json(std::span<const double> vals) {
  ordered_json arr = ordered_json::array();
  for (double v : vals) arr.push_back(v);
  return arr;
}

// The single series used by the univariate commands.
std::vector<double> single_column(const TimeSeries& ts) {
  std::vector<double> col(ts.length());
  for (std::size_t i = 0; i < col.size(); ++i) col[i] = ts.values[i * ts.dim];
  return col;
}

std::vector<double> column_of(const TimeSeries& ts, std::size_t c) {
  std::vector<double> col(ts.length());
  for (std::size_t i = 0; i < col.size(); ++i) col[i] = ts.values[i * ts.dim + c];
  return col;
}

// ---------------------------------------------------------------------------
// Per-command validation, after ingest but before any execution.

void require_columns(const TimeSeries& ts, std::size_t want) {
  if (ts.dim != want)
    throw FlagError("--value-cols must select exactly " + std::to_string(want) +
                    " column" + (want == 1 ? "" : "s") + ", got " +
                    std::to_string(ts.dim));
}

void validate(const Options& o, const TimeSeries& ts) {
  const std::size_t flat = ts.length() * ts.dim;
  const std::size_t dim = padded_dim(flat);

  if (o.command == "smooth") {
    if (!(o.alpha > 0.0 && o.alpha < 1.0)) throw FlagError("--alpha must lie in (0, 1)");
  } else if (o.command == "bin") {
    require_columns(ts, 1);
    if (o.k < 2 || (o.k & (o.k - 1)) != 0)
      throw FlagError("--k must be a power of two >= 2");
    if (o.k >= dim) throw FlagError("--k must be smaller than the padded length " +
                                    std::to_string(dim));
  } else if (o.command == "haar") {
    require_columns(ts, 1);
    if (o.has_keep && (o.keep < 1 || o.keep > dim))
      throw FlagError("--keep must lie in [1, " + std::to_string(dim) + "]");
  } else if (o.command == "qft-dist") {
    require_columns(ts, 2);
    if ((ts.length() & (ts.length() - 1)) != 0)
      throw FlagError("--input must have a power-of-two row count for qft-dist, got " +
                      std::to_string(ts.length()));
    if (o.has_shots && o.shots == 0) throw FlagError("--shots must be positive");
  } else if (o.command == "diff") {
    require_columns(ts, 1);
    if (o.has_d && o.has_s) throw FlagError("--d and --s are mutually exclusive");
    if (o.has_d && o.d != 1 && o.d != 2) throw FlagError("--d must be 1 or 2 for diff");
    if (o.has_s && (o.s < 1 || o.s >= dim))
      throw FlagError("--s must lie in [1, " + std::to_string(dim - 1) + "]");
    if (ts.length() < 2) throw FlagError("--input needs at least two rows to difference");
  } else if (o.command == "stationarity") {
    require_columns(ts, 1);
    if (ts.length() < 2) throw FlagError("--input needs at least two rows");
  } else if (o.command == "fit" || o.command == "forecast") {
    require_columns(ts, 1);
    if (ts.length() <= o.p + o.d + o.q + 2)
      throw FlagError("--p/--d/--q too large: series of length " +
                      std::to_string(ts.length()) + " needs length > " +
                      std::to_string(o.p + o.d + o.q + 2));
    if (o.command == "fit" && o.layers > 0) {
      if (o.p == 0 && o.q == 0)
        throw FlagError("--p or --q must be positive for a variational fit");
      if (o.max_iters < 1) throw FlagError("--max-iters must be positive");
    }
    if (o.command == "forecast" && o.horizon < 1)
      throw FlagError("--horizon must be positive");
  }
}

// ---------------------------------------------------------------------------
// Stage execution. Each helper appends one or more stage objects.

void run_encode(const Options&, const TimeSeries& ts, ordered_json& stages) {
  struct Attempt {
    const char* label;
    Encoded (*build)(const TimeSeries&);
  };
  const Attempt attempts[] = {
      {"superposed", encode_superposed},
      {"stacked", encode_stacked},
      {"tensor-product", encode_tensor},
  };
  for (const auto& at : attempts) {
    ordered_json stage;
    stage["name"] = "encode";
    stage["layout"] = at.label;
    try {
      const Encoded enc = at.build(ts);
      stage["n_qubits"] = enc.record.n_qubits;
      stage["pad_len"] = enc.record.pad_len;
      stage["global_norm"] = enc.record.global_norm;
      stage["per_block_norms"] = reals_json(enc.record.per_block_norms);
      stage["amplitudes"] = amps_json(enc.state.amplitudes);
    } catch (const Error& e) {
      stage["skipped"] = e.what();
    }
    stages.push_back(std::move(stage));
  }
}

void run_smooth(const Options& o, const TimeSeries& ts, ordered_json& stages) {
  const std::size_t dim = padded_dim(ts.dim);
  std::vector<StateVector> history;
  history.reserve(ts.length());
  for (std::size_t r = 0; r < ts.length(); ++r) {
    std::vector<cdouble> row(dim, 0.0);
    for (std::size_t c = 0; c < ts.dim; ++c) row[c] = ts.at(r, c);
    history.push_back(from_amplitudes(std::move(row)).first);
  }
  const auto coeff = smoothing_coefficients(o.alpha);
  const auto result = quantum_exp_smooth(history, o.alpha);

  ordered_json stage;
  stage["name"] = "smooth";
  stage["alpha"] = o.alpha;
  stage["a"] = coeff.a;
  stage["b"] = coeff.b;
  stage["norm_trace"] = reals_json(result.norm_trace);
  stage["smoothed"] = amps_json(result.smoothed.amplitudes);
  std::vector<cdouble> weighted = result.smoothed.amplitudes;
  for (auto& w : weighted) w *= result.norm_trace.back();
  stage["weighted"] = amps_json(weighted);
  stages.push_back(std::move(stage));

  ordered_json classical;
  classical["name"] = "classical-smooth";
  ordered_json cols = ordered_json::array();
  for (std::size_t c = 0; c < ts.dim; ++c)
    cols.push_back(reals_json(classical_exp_smooth(column_of(ts, c), o.alpha)));
  classical["columns"] = std::move(cols);
  stages.push_back(std::move(classical));
}

void run_bin(const Options& o, const TimeSeries& ts, ordered_json& stages) {
  const Encoded enc = encode_stacked(ts);
  const auto result = quantum_bin_average(enc.state, o.k);

  std::vector<double> padded = single_column(ts);
  padded.resize(enc.state.dim(), 0.0);

  ordered_json stage;
  stage["name"] = "bin";
  stage["k"] = o.k;
  stage["postselect_prob"] = result.postselect_prob;
  stage["reduced"] = amps_json(result.reduced.amplitudes);
  stage["classical_means"] = reals_json(classical_bin_means(padded, o.k));
  stages.push_back(std::move(stage));
}

void run_haar(const Options& o, const TimeSeries& ts, ordered_json& stages) {
  const Encoded enc = encode_stacked(ts);
  const StateVector transformed = quantum_haar_transform(enc.state);
  const std::size_t keep = o.has_keep ? o.keep : transformed.dim();
  // wavelet_compress runs the transform itself; hand it the raw encoded state.
  const auto compressed = wavelet_compress(enc.state, keep);

  ordered_json stage;
  stage["name"] = "haar";
  stage["transform"] = amps_json(transformed.amplitudes);
  stage["keep"] = keep;
  ordered_json kept = ordered_json::array();
  for (const auto& [idx, val] : compressed.kept)
    kept.push_back(ordered_json{{"index", idx}, {"re", val.real()}, {"im", val.imag()}});
  stage["kept"] = std::move(kept);
  stage["dropped_energy"] = compressed.dropped_energy;
  stages.push_back(std::move(stage));
}

void run_qft_dist(const Options& o, const TimeSeries& ts, ordered_json& stages) {
  const std::vector<double> y1 = column_of(ts, 0);
  const std::vector<double> y2 = column_of(ts, 1);
  const std::optional<std::uint64_t> shots =
      o.has_shots ? std::optional<std::uint64_t>(o.shots) : std::nullopt;

  QftDistanceReport rep;
  if (o.strategy == "stacked")
    rep = qft_distance_stacked(y1, y2);
  else if (o.strategy == "superposed")
    rep = qft_distance_superposed(y1, y2);
  else
    rep = qft_distance_two_register(y1, y2, shots, o.seed);

  ordered_json stage;
  stage["name"] = "qft-distance";
  stage["strategy"] = rep.strategy;
  stage["p_minus"] = rep.p_minus;
  stage["distance_estimate"] = rep.distance_estimate;
  stage["qubits_used"] = rep.qubits_used;
  if (rep.shots) stage["shots"] = *rep.shots;
  stage["overlap_flagged"] = rep.overlap_flagged;
  stages.push_back(std::move(stage));
}

void run_diff(const Options& o, const TimeSeries& ts, ordered_json& stages) {
  DifferenceOrder order = DifferenceOrder::first();
  if (o.has_s)
    order = DifferenceOrder::seasonal(o.s);
  else if (o.has_d && o.d == 2)
    order = DifferenceOrder::second();

  const Encoded enc = encode_stacked(ts);
  const auto result = quantum_difference(enc.state, order);

  std::vector<double> padded = single_column(ts);
  padded.resize(enc.state.dim(), 0.0);

  ordered_json stage;
  stage["name"] = "difference";
  switch (order.kind) {
    case DifferenceOrder::Kind::First: stage["order"] = "first"; break;
    case DifferenceOrder::Kind::Second: stage["order"] = "second"; break;
    case DifferenceOrder::Kind::Seasonal: stage["order"] = "seasonal"; break;
  }
  stage["lag"] = order.lag;
  stage["postselect_prob"] = result.postselect_prob;
  stage["full_state"] = amps_json(result.full_state.amplitudes);
  stage["difference_part"] = amps_json(result.difference_part.amplitudes);
  stage["classical_cyclic"] = reals_json(classical_difference(padded, order, true));
  stages.push_back(std::move(stage));
}

void run_stationarity(const Options&, const TimeSeries& ts, ordered_json& stages) {
  const Encoded enc = encode_stacked(ts);

  ordered_json stage;
  stage["name"] = "stationarity";
  stage["score_raw"] = stationarity_score(enc.state);
  try {
    const auto diffed = classical_difference(single_column(ts),
                                             DifferenceOrder::first(), false);
    const Encoded denc = encode_stacked(make_time_series(diffed));
    stage["score_differenced"] = stationarity_score(denc.state);
  } catch (const Error& e) {
    stage["differenced_skipped"] = e.what();
  }
  stages.push_back(std::move(stage));
}

ordered_json classical_fit_stage(const ClassicalFitResult& fit) {
  ordered_json stage;
  stage["name"] = "classical-fit";
  stage["p"] = fit.params.p;
  stage["d"] = fit.params.d;
  stage["q"] = fit.params.q;
  stage["c"] = fit.params.c;
  stage["a"] = reals_json(fit.params.a);
  stage["b"] = reals_json(fit.params.b);
  stage["mse"] = fit.mse;
  stage["converged"] = fit.converged;
  stage["loss_trace"] = reals_json(fit.loss_trace);
  stage["residuals"] = reals_json(fit.residuals);
  return stage;
}

void run_fit(const Options& o, const TimeSeries& ts, ordered_json& stages) {
  const std::vector<double> series = single_column(ts);
  stages.push_back(classical_fit_stage(classical_fit(series, o.p, o.d, o.q)));

  if (o.layers > 0) {
    VariationalConfig cfg;
    cfg.p = o.p;
    cfg.d = o.d;
    cfg.q = o.q;
    cfg.layers = o.layers;
    cfg.input_form = o.input_form == "weighted-sum"
                         ? InputForm::WeightedSum
                         : (o.input_form == "stacked" ? InputForm::Stacked
                                                      : InputForm::TwoRegister);
    cfg.optimizer = o.optimizer == "nelder-mead" ? Optimizer::NelderMead : Optimizer::Spsa;
    cfg.max_iters = o.max_iters;
    cfg.seed = o.seed;
    const auto fit = variational_fit(series, cfg);

    ordered_json stage;
    stage["name"] = "variational-fit";
    stage["n_qubits"] = fit.model.n_qubits;
    stage["layers"] = fit.model.layers;
    stage["input_form"] = o.input_form;
    stage["optimizer"] = o.optimizer;
    stage["max_iters"] = o.max_iters;
    stage["readout"] = fit.model.readout;
    stage["thetas"] = reals_json(fit.model.thetas);
    stage["mse"] = fit.mse;
    stage["converged"] = fit.converged;
    stage["loss_trace"] = reals_json(fit.loss_trace);
    stage["residuals"] = reals_json(fit.residuals);
    stages.push_back(std::move(stage));
  }
}

void run_forecast(const Options& o, const TimeSeries& ts, ordered_json& stages) {
  const std::vector<double> series = single_column(ts);
  const auto fit = classical_fit(series, o.p, o.d, o.q);
  stages.push_back(classical_fit_stage(fit));

  ordered_json stage;
  stage["name"] = "forecast";
  stage["horizon"] = o.horizon;
  stage["forecasts"] = reals_json(predict(fit.params, series, o.horizon));
  stages.push_back(std::move(stage));
}

// ---------------------------------------------------------------------------

const char* hint_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DegenerateInput:
      return "check for all-zero or exactly cancelling inputs";
    case ErrorKind::ImpossibleOutcome:
      return "the postselected branch has no probability mass; vary the input";
    case ErrorKind::RankDeficiency:
      return "the design matrix is singular; lower --p/--q or supply richer data";
    case ErrorKind::Capacity:
      return "reduce the input size to fit the simulator's qubit cap";
    default:
      return "check the stage parameters against the input dimensions";
  }
}

void register_common(CLI::App* sub, Options& o) {
  sub->add_option("--input", o.input, "input CSV file")->required();
  sub->add_option("--output", o.output, "write the report here instead of stdout");
  sub->add_option("--time-col", o.time_col, "name of the timestamp column");
  sub->add_option("--value-cols", o.value_cols, "comma-separated value columns")
      ->delimiter(',');
  sub->add_option("--seed", o.seed, "seed for all randomness");
  sub->add_flag("--pretty", o.pretty, "indent the JSON report");
}

int execute(const Options& o, std::ostream& out, std::ostream& err) {
  std::string stage = "ingest";
  const auto started = std::chrono::steady_clock::now();
  try {
    std::optional<std::string> time_col;
    if (o.has_time_col) time_col = o.time_col;
    const TimeSeries ts = ingest_csv(o.input, time_col, o.value_cols);

    stage = "validate";
    validate(o, ts);

    stage = o.command;
    ordered_json stages = ordered_json::array();
    if (o.command == "encode")
      run_encode(o, ts, stages);
    else if (o.command == "smooth")
      run_smooth(o, ts, stages);
    else if (o.command == "bin")
      run_bin(o, ts, stages);
    else if (o.command == "haar")
      run_haar(o, ts, stages);
    else if (o.command == "qft-dist")
      run_qft_dist(o, ts, stages);
    else if (o.command == "diff")
      run_diff(o, ts, stages);
    else if (o.command == "stationarity")
      run_stationarity(o, ts, stages);
    else if (o.command == "fit")
      run_fit(o, ts, stages);
    else if (o.command == "forecast")
      run_forecast(o, ts, stages);

    stage = "emit";
    const std::size_t flat = ts.length() * ts.dim;
    ordered_json report;
    report["command"] = o.command;
    report["version"] = kVersion;
    report["seed"] = o.seed;
    report["input"] = ordered_json{{"path", o.input},
                                   {"n", ts.length()},
                                   {"d", ts.dim},
                                   {"pad_len", padded_dim(flat) - flat}};
    report["stages"] = std::move(stages);
    const auto elapsed = std::chrono::steady_clock::now() - started;
    report["wall_clock_ms"] =
        std::chrono::duration<double, std::milli>(elapsed).count();

    const std::string text = report.dump(o.pretty ? 2 : -1) + "\n";
    if (o.output.empty()) {
      out << text;
    } else {
      std::ofstream file(o.output);
      if (!file) throw IoError("cannot open output file '" + o.output + "'");
      file << text;
    }
    return 0;
  } catch (const FlagError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    err << "error in stage '" << stage << "': " << e.what() << "\n";
    return 3;
  } catch (const ValidationError& e) {
    err << "error in stage '" << stage << "': " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    err << "error in stage '" << stage << "': " << e.what() << "; "
        << hint_for(e.kind()) << "\n";
    return 4;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"quantum time-series analysis pipeline"};
  app.require_subcommand(1);

  auto* encode = app.add_subcommand("encode", "amplitude-encode the series");
  auto* smooth = app.add_subcommand("smooth", "exponential smoothing of row states");
  auto* bin = app.add_subcommand("bin", "bin averaging by postselection");
  auto* haar = app.add_subcommand("haar", "wavelet transform and compression");
  auto* qft = app.add_subcommand("qft-dist", "spectral distance between two columns");
  auto* diff = app.add_subcommand("diff", "differencing by shifted interference");
  auto* stat = app.add_subcommand("stationarity", "overlap with the uniform state");
  auto* fit = app.add_subcommand("fit", "classical and variational model fitting");
  auto* fc = app.add_subcommand("forecast", "fit and extrapolate");

  for (auto* sub : {encode, smooth, bin, haar, qft, diff, stat, fit, fc})
    register_common(sub, o);

  smooth->add_option("--alpha", o.alpha, "smoothing weight in (0, 1)")->required();
  bin->add_option("--k", o.k, "bin width (power of two)")->required();
  haar->add_option("--keep", o.keep, "number of coefficients to keep");
  qft->add_option("--strategy", o.strategy, "distance strategy")
      ->check(CLI::IsMember({"stacked", "superposed", "two-register"}));
  qft->add_option("--shots", o.shots, "sample count for the swap test");
  diff->add_option("--d", o.d, "difference order (1 or 2)");
  diff->add_option("--s", o.s, "seasonal lag");
  for (auto* sub : {fit, fc}) {
    sub->add_option("--p", o.p, "autoregressive order");
    sub->add_option("--d", o.d, "difference order");
    sub->add_option("--q", o.q, "moving-average order");
  }
  fit->add_option("--layers", o.layers, "variational circuit layers (0 = classical only)");
  fit->add_option("--input-form", o.input_form, "variational input form")
      ->check(CLI::IsMember({"two-register", "weighted-sum", "stacked"}));
  fit->add_option("--optimizer", o.optimizer, "variational optimizer")
      ->check(CLI::IsMember({"spsa", "nelder-mead"}));
  fit->add_option("--max-iters", o.max_iters, "optimizer iteration budget");
  fc->add_option("--horizon", o.horizon, "number of steps to forecast")->required();

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("qts");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(int(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  }

  CLI::App* active = app.get_subcommands().front();
  o.command = active->get_name();
  const auto present = [active](const char* name) {
    const CLI::Option* opt = active->get_option_no_throw(name);
    return opt != nullptr && opt->count() > 0;
  };
  o.has_d = present("--d");
  o.has_s = present("--s");
  o.has_keep = present("--keep");
  o.has_shots = present("--shots");
  o.has_time_col = present("--time-col");

  return execute(o, out, err);
}

}  // namespace qts::cli
