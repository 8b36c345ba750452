#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qrb/bench/correlation_study.hpp"
#include "qrb/io/toml.hpp"
#include "qrb/noise/channel.hpp"
#include "qrb/tomo/bootstrap.hpp"
#include "qrb/tomo/qdt.hpp"
#include "qrb/tomo/qst.hpp"

namespace qrb {

enum class StudyKind { kQdt, kQst, kThreshold, kBudget, kQrem3, kCorrelation, kBaseline };

inline std::string study_kind_name(StudyKind k) {
  switch (k) {
    case StudyKind::kQdt: return "qdt";
    case StudyKind::kQst: return "qst";
    case StudyKind::kThreshold: return "threshold";
    case StudyKind::kBudget: return "budget";
    case StudyKind::kQrem3: return "qrem3";
    case StudyKind::kCorrelation: return "correlation";
    default: return "baseline";
  }
}

inline std::optional<StudyKind> study_kind_from_name(const std::string& s) {
  for (StudyKind k : {StudyKind::kQdt, StudyKind::kQst, StudyKind::kThreshold, StudyKind::kBudget,
                      StudyKind::kQrem3, StudyKind::kCorrelation, StudyKind::kBaseline})
    if (study_kind_name(k) == s) return k;
  return std::nullopt;
}

/// One noise channel of a scenario, in config form.
struct ChannelConfig {
  std::string type;  // confusion | depolarizing | iswap | rotation
  double e = 0.0;                                 // confusion (symmetric per-qubit)
  std::vector<std::vector<double>> matrix;        // confusion (explicit, optional)
  double k = 0.0;                                 // depolarizing / iswap strength
  std::vector<int> qubits;                        // depolarizing targets (empty = all)
  std::string axis = "x";                         // rotation axis
  double angle = 0.0;                             // rotation: U = exp(-i angle P) per qubit
};

struct QdtSectionConfig {
  long long shots_per_cell = 1000;
  std::optional<long long> total_shots;  // alternative to shots_per_cell
  int max_iterations = 5000;
  double tol = 1e-10;
};

struct QstSectionConfig {
  Estimator estimator = Estimator::kMle;
  int max_iterations = 5000;
  double tol = 1e-10;
  double dilution = 0.5;
  int chain_length = 10000;
  int burn_in = 1000;
  double proposal_scale = 0.1;
  int prior_rank = 0;

  QstConfig to_qst_config() const {
    QstConfig c;
    c.estimator = estimator;
    c.max_iterations = max_iterations;
    c.convergence_tol = tol;
    c.dilution = dilution;
    c.bme_chain_length = chain_length;
    c.bme_burn_in = burn_in;
    c.bme_proposal_scale = proposal_scale;
    c.bme_prior_rank = prior_rank;
    return c;
  }
};

struct QstStudyConfig {
  int n_targets = 4;
  long long shots_per_setting = 1000;
};

struct ThresholdStudyConfig {
  std::vector<double> thresholds = {0.20, 0.15, 0.10};
  int n_targets = 16;
  long long shots_min = 100;
  long long shots_max = 100000;
  int points_per_decade = 20;
  int crossing_resamples = 200;
};

struct BudgetStudyConfig {
  long long total_budget = 10000;
  std::vector<double> r_grid = {0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95};
  int n_targets = 40;
};

struct Qrem3StudyConfig {
  std::vector<long long> shots_per_basis = {1000, 3000, 10000};
  long long qdt_shots_per_cell = 1000;
  std::string target = "ghz";  // ghz | haar
  int bootstrap_resamples = 1000;
};

struct CorrelationStudyConfig {
  std::vector<long long> shot_grid = {1000, 4000, 16000, 64000};
  std::vector<double> amplitudes;  // empty = no amplitude sweep
  AmplitudeMap amplitude_map;
  int baseline_trials = 20;
  std::vector<ChannelConfig> baseline_channels;  // single-qubit, for the band
};

struct BaselineStudyConfig {
  std::vector<long long> shot_grid = {1000, 4000, 16000, 64000};
  int n_trials = 50;
  std::vector<ChannelConfig> channels;  // single-qubit readout noise
};

/// A fully validated study description.
struct ExperimentConfig {
  StudyKind kind = StudyKind::kQdt;
  int n_qubits = 1;
  std::uint64_t seed = 0;
  std::string out_dir = "results";
  std::vector<ChannelConfig> noise;
  QdtSectionConfig qdt;
  QstSectionConfig qst;
  QstStudyConfig qst_study;
  ThresholdStudyConfig threshold;
  BudgetStudyConfig budget;
  Qrem3StudyConfig qrem3;
  CorrelationStudyConfig correlation;
  BaselineStudyConfig baseline;

  QdtConfig qdt_config() const {
    QdtConfig c;
    c.max_iterations = qdt.max_iterations;
    c.convergence_tol = qdt.tol;
    return c;
  }
  QstConfig qst_config() const { return qst.to_qst_config(); }
};

struct ConfigError : std::runtime_error {
  std::vector<std::string> errors;
  explicit ConfigError(std::vector<std::string> errs)
      : std::runtime_error(join(errs)), errors(std::move(errs)) {}

 private:
  static std::string join(const std::vector<std::string>& errs) {
    std::ostringstream os;
    os << "configuration invalid (" << errs.size() << " error" << (errs.size() == 1 ? "" : "s") << "):";
    for (const auto& e : errs) os << "\n  - " << e;
    return os.str();
  }
};

namespace config_detail {

/// Reads one table, tracking consumed keys so unknown ones can be
/// rejected, and accumulating every error instead of stopping at the
/// first.
class TableReader {
 public:
  TableReader(const ConfigTable& table, std::string path, std::vector<std::string>& errors)
      : table_(table), path_(std::move(path)), errors_(errors) {}

  bool has(const std::string& key) const { return table_.count(key) > 0; }

  template <typename T>
  std::optional<T> get(const std::string& key) {
    auto it = table_.find(key);
    if (it == table_.end()) return std::nullopt;
    consumed_.insert(key);
    if constexpr (std::is_same_v<T, double>) {
      if (std::holds_alternative<double>(it->second.v)) return std::get<double>(it->second.v);
      if (std::holds_alternative<long long>(it->second.v))
        return static_cast<double>(std::get<long long>(it->second.v));
      fail(key, "expected a number");
      return std::nullopt;
    } else if constexpr (std::is_same_v<T, long long>) {
      if (std::holds_alternative<long long>(it->second.v)) return std::get<long long>(it->second.v);
      fail(key, "expected an integer");
      return std::nullopt;
    } else if constexpr (std::is_same_v<T, bool>) {
      if (std::holds_alternative<bool>(it->second.v)) return std::get<bool>(it->second.v);
      fail(key, "expected a boolean");
      return std::nullopt;
    } else {
      if (std::holds_alternative<std::string>(it->second.v)) return std::get<std::string>(it->second.v);
      fail(key, "expected a string");
      return std::nullopt;
    }
  }

  template <typename T>
  std::optional<std::vector<T>> get_array(const std::string& key) {
    auto it = table_.find(key);
    if (it == table_.end()) return std::nullopt;
    consumed_.insert(key);
    if (!it->second.is_array()) {
      fail(key, "expected an array");
      return std::nullopt;
    }
    std::vector<T> out;
    for (const auto& elem : std::get<ConfigArray>(it->second.v)) {
      if constexpr (std::is_same_v<T, double>) {
        if (std::holds_alternative<double>(elem.v))
          out.push_back(std::get<double>(elem.v));
        else if (std::holds_alternative<long long>(elem.v))
          out.push_back(static_cast<double>(std::get<long long>(elem.v)));
        else {
          fail(key, "expected an array of numbers");
          return std::nullopt;
        }
      } else if constexpr (std::is_same_v<T, long long>) {
        if (std::holds_alternative<long long>(elem.v))
          out.push_back(std::get<long long>(elem.v));
        else {
          fail(key, "expected an array of integers");
          return std::nullopt;
        }
      } else {
        if (std::holds_alternative<std::string>(elem.v))
          out.push_back(std::get<std::string>(elem.v));
        else {
          fail(key, "expected an array of strings");
          return std::nullopt;
        }
      }
    }
    return out;
  }

  std::optional<std::vector<std::vector<double>>> get_matrix(const std::string& key) {
    auto it = table_.find(key);
    if (it == table_.end()) return std::nullopt;
    consumed_.insert(key);
    if (!it->second.is_array()) {
      fail(key, "expected an array of rows");
      return std::nullopt;
    }
    std::vector<std::vector<double>> rows;
    for (const auto& row : std::get<ConfigArray>(it->second.v)) {
      if (!row.is_array()) {
        fail(key, "expected an array of rows");
        return std::nullopt;
      }
      std::vector<double> r;
      for (const auto& elem : std::get<ConfigArray>(row.v)) {
        if (std::holds_alternative<double>(elem.v))
          r.push_back(std::get<double>(elem.v));
        else if (std::holds_alternative<long long>(elem.v))
          r.push_back(static_cast<double>(std::get<long long>(elem.v)));
        else {
          fail(key, "expected numeric entries");
          return std::nullopt;
        }
      }
      rows.push_back(std::move(r));
    }
    return rows;
  }

  std::optional<TableReader> sub(const std::string& key) {
    auto it = table_.find(key);
    if (it == table_.end()) return std::nullopt;
    consumed_.insert(key);
    if (!it->second.is_table()) {
      fail(key, "expected a table");
      return std::nullopt;
    }
    return TableReader(std::get<ConfigTable>(it->second.v), prefixed(key), errors_);
  }

  std::vector<TableReader> sub_array(const std::string& key) {
    std::vector<TableReader> out;
    auto it = table_.find(key);
    if (it == table_.end()) return out;
    consumed_.insert(key);
    if (!it->second.is_array()) {
      fail(key, "expected an array of tables");
      return out;
    }
    const auto& arr = std::get<ConfigArray>(it->second.v);
    for (std::size_t i = 0; i < arr.size(); ++i) {
      if (!arr[i].is_table()) {
        fail(key, "expected an array of tables");
        return {};
      }
      out.emplace_back(std::get<ConfigTable>(arr[i].v), prefixed(key) + "[" + std::to_string(i) + "]", errors_);
    }
    return out;
  }

  void fail(const std::string& key, const std::string& message) {
    errors_.push_back("field " + prefixed(key) + ": " + message);
  }

  void error_here(const std::string& message) {
    errors_.push_back((path_.empty() ? std::string("config") : path_) + ": " + message);
  }

  /// Flags keys that no reader consumed.
  void reject_unknown_keys() {
    for (const auto& [key, value] : table_)
      if (!consumed_.count(key)) errors_.push_back("unknown key '" + prefixed(key) + "'");
  }

  std::string prefixed(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  const ConfigTable& table_;
  std::string path_;
  std::set<std::string> consumed_;
  std::vector<std::string>& errors_;
};

inline void read_channel(TableReader& reader, ChannelConfig& ch, std::vector<std::string>& errors) {
  const auto type = reader.get<std::string>("type");
  if (!type) {
    reader.error_here("missing channel type");
    return;
  }
  ch.type = *type;
  if (ch.type == "confusion") {
    if (auto e = reader.get<double>("e")) {
      ch.e = *e;
      if (ch.e < 0.0 || ch.e > 1.0) reader.fail("e", "must be in [0, 1] (got " + std::to_string(ch.e) + ")");
    }
    if (auto m = reader.get_matrix("matrix")) {
      ch.matrix = *m;
      const std::size_t n = ch.matrix.size();
      bool square = n >= 2;
      for (const auto& row : ch.matrix) square = square && row.size() == n;
      if (!square) {
        reader.fail("matrix", "must be square with dimension >= 2");
      } else {
        for (std::size_t j = 0; j < n; ++j) {
          double col = 0.0;
          bool nonneg = true;
          for (std::size_t i = 0; i < n; ++i) {
            col += ch.matrix[i][j];
            nonneg = nonneg && ch.matrix[i][j] >= 0.0;
          }
          if (!nonneg || std::abs(col - 1.0) > 1e-10) {
            reader.fail("matrix", "columns must be nonnegative and sum to 1 (column " + std::to_string(j) + ")");
            break;
          }
        }
      }
    }
    if (!reader.has("e") && ch.matrix.empty()) reader.error_here("confusion channel needs 'e' or 'matrix'");
  } else if (ch.type == "depolarizing") {
    if (auto k = reader.get<double>("k")) {
      ch.k = *k;
      if (ch.k < 0.0 || ch.k > 1.0) reader.fail("k", "must be in [0, 1] (got " + std::to_string(ch.k) + ")");
    } else {
      reader.error_here("depolarizing channel needs 'k'");
    }
    if (auto q = reader.get_array<long long>("qubits")) {
      for (long long v : *q) ch.qubits.push_back(static_cast<int>(v));
    }
  } else if (ch.type == "iswap") {
    if (auto k = reader.get<double>("k")) {
      ch.k = *k;
      if (ch.k < 0.0 || ch.k > 1.0) reader.fail("k", "must be in [0, 1] (got " + std::to_string(ch.k) + ")");
    } else {
      reader.error_here("iswap channel needs 'k'");
    }
    if (auto q = reader.get_array<long long>("qubits")) {
      for (long long v : *q) ch.qubits.push_back(static_cast<int>(v));
      if (ch.qubits.size() != 2) reader.fail("qubits", "iswap needs exactly two qubits");
    } else {
      ch.qubits = {0, 1};
    }
  } else if (ch.type == "rotation") {
    if (auto a = reader.get<std::string>("axis")) {
      ch.axis = *a;
      if (ch.axis != "x" && ch.axis != "y" && ch.axis != "z") reader.fail("axis", "must be x, y or z");
    }
    if (auto ang = reader.get<double>("angle")) {
      ch.angle = *ang;
    } else {
      reader.error_here("rotation channel needs 'angle'");
    }
    if (auto q = reader.get_array<long long>("qubits")) {
      for (long long v : *q) ch.qubits.push_back(static_cast<int>(v));
    }
  } else {
    reader.error_here("unknown channel type '" + ch.type + "'");
  }
  reader.reject_unknown_keys();
  (void)errors;
}

}  // namespace config_detail

/// Builds the scenario NoiseChannel from channel configs.
inline NoiseChannel build_channel(const std::vector<ChannelConfig>& channels, int n_qubits) {
  Composite composite;
  for (const auto& ch : channels) {
    if (ch.type == "confusion") {
      Eigen::MatrixXd c;
      if (!ch.matrix.empty()) {
        const auto n = static_cast<Eigen::Index>(ch.matrix.size());
        c.resize(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
          for (Eigen::Index j = 0; j < n; ++j) c(i, j) = ch.matrix[i][j];
      } else {
        c = symmetric_confusion(n_qubits, ch.e);
      }
      composite.channels.push_back(make_channel(ConfusionMatrix(std::move(c))));
    } else if (ch.type == "depolarizing") {
      std::vector<int> qubits = ch.qubits;
      if (qubits.empty())
        for (int q = 0; q < n_qubits; ++q) qubits.push_back(q);
      composite.channels.push_back(make_channel(Depolarizing(ch.k, std::move(qubits))));
    } else if (ch.type == "iswap") {
      composite.channels.push_back(make_channel(ProbabilisticIswap(ch.k, ch.qubits.at(0), ch.qubits.at(1))));
    } else if (ch.type == "rotation") {
      const Pauli axis = pauli_from_char(ch.axis.at(0));
      if (ch.qubits.empty()) {
        composite.channels.push_back(make_channel(CoherentRotation(uniform_rotation(n_qubits, axis, ch.angle))));
      } else {
        Mat u = identity(Eigen::Index(1) << n_qubits);
        for (int q : ch.qubits) u = embed_single_qubit(pauli_rotation(axis, ch.angle), n_qubits, q) * u;
        composite.channels.push_back(make_channel(CoherentRotation(std::move(u))));
      }
    } else {
      throw std::invalid_argument("build_channel: unknown channel type '" + ch.type + "'");
    }
  }
  return make_channel(std::move(composite));
}

/// Parses and validates a config from an already-parsed value tree;
/// reports every problem found, not just the first.
inline ExperimentConfig config_from_table(const ConfigTable& root) {
  std::vector<std::string> errors;
  config_detail::TableReader reader(root, "", errors);
  ExperimentConfig cfg;

  if (auto kind = reader.get<std::string>("kind")) {
    if (auto k = study_kind_from_name(*kind))
      cfg.kind = *k;
    else
      reader.fail("kind", "unknown study kind '" + *kind + "'");
  } else {
    reader.error_here("missing 'kind'");
  }
  if (auto n = reader.get<long long>("n_qubits")) {
    cfg.n_qubits = static_cast<int>(*n);
    if (cfg.n_qubits < 1 || cfg.n_qubits > 3) reader.fail("n_qubits", "must be 1, 2 or 3");
  } else {
    cfg.n_qubits = cfg.kind == StudyKind::kQrem3 ? 3 : (cfg.kind == StudyKind::kCorrelation || cfg.kind == StudyKind::kBaseline ? 2 : 1);
  }
  if (auto s = reader.get<long long>("seed")) cfg.seed = static_cast<std::uint64_t>(*s);
  if (auto o = reader.get<std::string>("out_dir")) cfg.out_dir = *o;

  if (auto noise = reader.sub("noise")) {
    for (auto& ch_reader : noise->sub_array("channels")) {
      ChannelConfig ch;
      config_detail::read_channel(ch_reader, ch, errors);
      cfg.noise.push_back(std::move(ch));
    }
    noise->reject_unknown_keys();
  }

  if (auto qdt = reader.sub("qdt")) {
    if (auto v = qdt->get<long long>("shots_per_cell")) cfg.qdt.shots_per_cell = *v;
    if (auto v = qdt->get<long long>("total_shots")) cfg.qdt.total_shots = *v;
    if (qdt->has("shots_per_cell") && cfg.qdt.total_shots)
      qdt->error_here("set either shots_per_cell or total_shots, not both");
    if (auto v = qdt->get<long long>("max_iterations")) cfg.qdt.max_iterations = static_cast<int>(*v);
    if (auto v = qdt->get<double>("tol")) cfg.qdt.tol = *v;
    if (cfg.qdt.shots_per_cell < 1) qdt->fail("shots_per_cell", "must be >= 1");
    if (cfg.qdt.max_iterations < 1) qdt->fail("max_iterations", "must be >= 1");
    if (cfg.qdt.tol <= 0) qdt->fail("tol", "must be positive");
    qdt->reject_unknown_keys();
  }

  if (auto qst = reader.sub("qst")) {
    if (auto v = qst->get<std::string>("estimator")) {
      if (*v == "mle")
        cfg.qst.estimator = Estimator::kMle;
      else if (*v == "bme")
        cfg.qst.estimator = Estimator::kBme;
      else
        qst->fail("estimator", "must be 'mle' or 'bme'");
    }
    if (auto v = qst->get<long long>("max_iterations")) cfg.qst.max_iterations = static_cast<int>(*v);
    if (auto v = qst->get<double>("tol")) cfg.qst.tol = *v;
    if (auto v = qst->get<double>("dilution")) cfg.qst.dilution = *v;
    if (auto v = qst->get<long long>("chain_length")) cfg.qst.chain_length = static_cast<int>(*v);
    if (auto v = qst->get<long long>("burn_in")) cfg.qst.burn_in = static_cast<int>(*v);
    if (auto v = qst->get<double>("proposal_scale")) cfg.qst.proposal_scale = *v;
    if (auto v = qst->get<long long>("prior_rank")) cfg.qst.prior_rank = static_cast<int>(*v);
    if (cfg.qst.dilution <= 0.0 || cfg.qst.dilution > 1.0) qst->fail("dilution", "must be in (0, 1]");
    if (cfg.qst.burn_in < 0 || cfg.qst.chain_length <= cfg.qst.burn_in)
      qst->fail("chain_length", "must exceed burn_in");
    if (cfg.qst.proposal_scale <= 0.0 || cfg.qst.proposal_scale >= 1.0)
      qst->fail("proposal_scale", "must be in (0, 1)");
    qst->reject_unknown_keys();
  }

  if (auto st = reader.sub("qst_study")) {
    if (auto v = st->get<long long>("n_targets")) cfg.qst_study.n_targets = static_cast<int>(*v);
    if (auto v = st->get<long long>("shots_per_setting")) cfg.qst_study.shots_per_setting = *v;
    if (cfg.qst_study.n_targets < 1) st->fail("n_targets", "must be >= 1");
    if (cfg.qst_study.shots_per_setting < 1) st->fail("shots_per_setting", "must be >= 1");
    st->reject_unknown_keys();
  }

  if (auto th = reader.sub("threshold")) {
    if (auto v = th->get_array<double>("thresholds")) cfg.threshold.thresholds = *v;
    if (auto v = th->get<long long>("n_targets")) cfg.threshold.n_targets = static_cast<int>(*v);
    if (auto v = th->get<long long>("shots_min")) cfg.threshold.shots_min = *v;
    if (auto v = th->get<long long>("shots_max")) cfg.threshold.shots_max = *v;
    if (auto v = th->get<long long>("points_per_decade")) cfg.threshold.points_per_decade = static_cast<int>(*v);
    if (auto v = th->get<long long>("crossing_resamples")) cfg.threshold.crossing_resamples = static_cast<int>(*v);
    if (cfg.threshold.thresholds.empty()) th->fail("thresholds", "must be nonempty");
    for (double t : cfg.threshold.thresholds)
      if (t <= 0.0 || t >= 1.0) th->fail("thresholds", "entries must lie in (0, 1)");
    if (cfg.threshold.n_targets < 1) th->fail("n_targets", "must be >= 1");
    if (cfg.threshold.shots_min < 1 || cfg.threshold.shots_max <= cfg.threshold.shots_min)
      th->fail("shots_max", "need 1 <= shots_min < shots_max");
    if (cfg.threshold.points_per_decade < 1) th->fail("points_per_decade", "must be >= 1");
    th->reject_unknown_keys();
  }

  if (auto bu = reader.sub("budget")) {
    if (auto v = bu->get<long long>("total_budget")) cfg.budget.total_budget = *v;
    if (auto v = bu->get_array<double>("r_grid")) cfg.budget.r_grid = *v;
    if (auto v = bu->get<long long>("n_targets")) cfg.budget.n_targets = static_cast<int>(*v);
    if (cfg.budget.total_budget < 100) bu->fail("total_budget", "must be >= 100");
    if (cfg.budget.r_grid.empty()) bu->fail("r_grid", "must be nonempty");
    for (std::size_t i = 0; i < cfg.budget.r_grid.size(); ++i) {
      if (cfg.budget.r_grid[i] < 0.0 || cfg.budget.r_grid[i] >= 1.0) {
        bu->fail("r_grid", "entries must lie in [0, 1)");
        break;
      }
      if (i > 0 && cfg.budget.r_grid[i] <= cfg.budget.r_grid[i - 1]) {
        bu->fail("r_grid", "must be strictly increasing");
        break;
      }
    }
    if (cfg.budget.n_targets < 1) bu->fail("n_targets", "must be >= 1");
    bu->reject_unknown_keys();
  }

  if (auto q3 = reader.sub("qrem3")) {
    if (auto v = q3->get_array<long long>("shots_per_basis")) cfg.qrem3.shots_per_basis = *v;
    if (auto v = q3->get<long long>("qdt_shots_per_cell")) cfg.qrem3.qdt_shots_per_cell = *v;
    if (auto v = q3->get<std::string>("target")) cfg.qrem3.target = *v;
    if (auto v = q3->get<long long>("bootstrap_resamples")) cfg.qrem3.bootstrap_resamples = static_cast<int>(*v);
    if (cfg.qrem3.shots_per_basis.empty()) q3->fail("shots_per_basis", "must be nonempty");
    for (std::size_t i = 1; i < cfg.qrem3.shots_per_basis.size(); ++i)
      if (cfg.qrem3.shots_per_basis[i] <= cfg.qrem3.shots_per_basis[i - 1]) {
        q3->fail("shots_per_basis", "must be strictly increasing");
        break;
      }
    if (cfg.qrem3.qdt_shots_per_cell < 1) q3->fail("qdt_shots_per_cell", "must be >= 1");
    if (cfg.qrem3.target != "ghz" && cfg.qrem3.target != "haar") q3->fail("target", "must be 'ghz' or 'haar'");
    if (cfg.qrem3.bootstrap_resamples < 2) q3->fail("bootstrap_resamples", "must be >= 2");
    q3->reject_unknown_keys();
  }

  if (auto co = reader.sub("correlation")) {
    if (auto v = co->get_array<long long>("shot_grid")) cfg.correlation.shot_grid = *v;
    if (auto v = co->get_array<double>("amplitudes")) cfg.correlation.amplitudes = *v;
    if (auto v = co->get<long long>("baseline_trials")) cfg.correlation.baseline_trials = static_cast<int>(*v);
    if (auto am = co->sub("amplitude_map")) {
      if (auto a = am->get_array<double>("amplitudes")) cfg.correlation.amplitude_map.amplitudes = *a;
      if (auto f = am->get_array<double>("fidelities")) cfg.correlation.amplitude_map.fidelities = *f;
      am->reject_unknown_keys();
      try {
        cfg.correlation.amplitude_map.validate();
      } catch (const std::exception& e) {
        am->error_here(e.what());
      }
    }
    for (auto& ch_reader : co->sub_array("baseline_channels")) {
      ChannelConfig ch;
      config_detail::read_channel(ch_reader, ch, errors);
      cfg.correlation.baseline_channels.push_back(std::move(ch));
    }
    if (cfg.correlation.shot_grid.empty()) co->fail("shot_grid", "must be nonempty");
    for (std::size_t i = 1; i < cfg.correlation.shot_grid.size(); ++i)
      if (cfg.correlation.shot_grid[i] <= cfg.correlation.shot_grid[i - 1]) {
        co->fail("shot_grid", "must be strictly increasing");
        break;
      }
    if (cfg.correlation.baseline_trials < 10) co->fail("baseline_trials", "must be >= 10");
    co->reject_unknown_keys();
  }

  if (auto ba = reader.sub("baseline")) {
    if (auto v = ba->get_array<long long>("shot_grid")) cfg.baseline.shot_grid = *v;
    if (auto v = ba->get<long long>("n_trials")) cfg.baseline.n_trials = static_cast<int>(*v);
    for (auto& ch_reader : ba->sub_array("channels")) {
      ChannelConfig ch;
      config_detail::read_channel(ch_reader, ch, errors);
      cfg.baseline.channels.push_back(std::move(ch));
    }
    if (cfg.baseline.shot_grid.empty()) ba->fail("shot_grid", "must be nonempty");
    for (std::size_t i = 1; i < cfg.baseline.shot_grid.size(); ++i)
      if (cfg.baseline.shot_grid[i] <= cfg.baseline.shot_grid[i - 1]) {
        ba->fail("shot_grid", "must be strictly increasing");
        break;
      }
    if (cfg.baseline.n_trials < 10) ba->fail("n_trials", "must be >= 10");
    ba->reject_unknown_keys();
  }

  // Cross-field checks.
  if (cfg.kind == StudyKind::kQrem3 && cfg.n_qubits != 3)
    errors.push_back("field n_qubits: qrem3 studies require n_qubits = 3");
  if ((cfg.kind == StudyKind::kCorrelation || cfg.kind == StudyKind::kBaseline) && cfg.n_qubits != 2)
    errors.push_back("field n_qubits: correlation and baseline studies require n_qubits = 2");
  for (std::size_t i = 0; i < cfg.noise.size(); ++i) {
    const auto& ch = cfg.noise[i];
    for (int q : ch.qubits)
      if (q < 0 || q >= cfg.n_qubits)
        errors.push_back("field noise.channels[" + std::to_string(i) + "].qubits: qubit index out of range");
    if (ch.type == "confusion" && !ch.matrix.empty() &&
        ch.matrix.size() != (std::size_t(1) << cfg.n_qubits))
      errors.push_back("field noise.channels[" + std::to_string(i) +
                       "].matrix: dimension must equal the outcome count 2^n_qubits");
  }

  reader.reject_unknown_keys();
  if (!errors.empty()) throw ConfigError(std::move(errors));
  return cfg;
}

namespace config_detail {

inline ConfigValue json_to_value(const nlohmann::json& j) {
  if (j.is_boolean()) return ConfigValue{j.get<bool>()};
  if (j.is_number_integer() || j.is_number_unsigned()) return ConfigValue{j.get<long long>()};
  if (j.is_number_float()) return ConfigValue{j.get<double>()};
  if (j.is_string()) return ConfigValue{j.get<std::string>()};
  if (j.is_array()) {
    ConfigArray arr;
    for (const auto& e : j) arr.push_back(json_to_value(e));
    return ConfigValue{std::move(arr)};
  }
  if (j.is_object()) {
    ConfigTable t;
    for (auto it = j.begin(); it != j.end(); ++it) t.emplace(it.key(), json_to_value(it.value()));
    return ConfigValue{std::move(t)};
  }
  throw std::invalid_argument("config JSON must not contain nulls");
}

}  // namespace config_detail

/// Parses TOML (default) or JSON text into a validated config. Syntax
/// errors carry line/column; semantic errors are reported all at once.
inline ExperimentConfig parse_config_text(const std::string& text, bool json_format) {
  if (json_format) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      // Recover line/column from the byte offset for uniform reporting.
      int line = 1, col = 1;
      for (std::size_t i = 0; i < std::min(text.size(), static_cast<std::size_t>(e.byte)); ++i) {
        if (text[i] == '\n') {
          ++line;
          col = 1;
        } else {
          ++col;
        }
      }
      throw ConfigParseError(line, col, e.what());
    }
    if (!j.is_object()) throw ConfigError({"top-level JSON value must be an object"});
    return config_from_table(std::get<ConfigTable>(config_detail::json_to_value(j).v));
  }
  return config_from_table(parse_toml(text));
}

/// Canonical serialization of a config (JSON is an accepted input
/// format, so parse(serialize(cfg)) round-trips).
inline nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["kind"] = study_kind_name(cfg.kind);
  j["n_qubits"] = cfg.n_qubits;
  j["seed"] = cfg.seed;
  j["out_dir"] = cfg.out_dir;

  auto channel_json = [](const ChannelConfig& ch) {
    nlohmann::json c;
    c["type"] = ch.type;
    if (ch.type == "confusion") {
      if (!ch.matrix.empty())
        c["matrix"] = ch.matrix;
      else
        c["e"] = ch.e;
    } else if (ch.type == "depolarizing") {
      c["k"] = ch.k;
      if (!ch.qubits.empty()) c["qubits"] = ch.qubits;
    } else if (ch.type == "iswap") {
      c["k"] = ch.k;
      c["qubits"] = ch.qubits.empty() ? std::vector<int>{0, 1} : ch.qubits;
    } else if (ch.type == "rotation") {
      c["axis"] = ch.axis;
      c["angle"] = ch.angle;
      if (!ch.qubits.empty()) c["qubits"] = ch.qubits;
    }
    return c;
  };

  if (!cfg.noise.empty()) {
    nlohmann::json channels = nlohmann::json::array();
    for (const auto& ch : cfg.noise) channels.push_back(channel_json(ch));
    j["noise"]["channels"] = std::move(channels);
  }

  j["qdt"]["shots_per_cell"] = cfg.qdt.shots_per_cell;
  if (cfg.qdt.total_shots) j["qdt"]["total_shots"] = *cfg.qdt.total_shots;
  j["qdt"]["max_iterations"] = cfg.qdt.max_iterations;
  j["qdt"]["tol"] = cfg.qdt.tol;

  j["qst"]["estimator"] = estimator_name(cfg.qst.estimator);
  j["qst"]["max_iterations"] = cfg.qst.max_iterations;
  j["qst"]["tol"] = cfg.qst.tol;
  j["qst"]["dilution"] = cfg.qst.dilution;
  j["qst"]["chain_length"] = cfg.qst.chain_length;
  j["qst"]["burn_in"] = cfg.qst.burn_in;
  j["qst"]["proposal_scale"] = cfg.qst.proposal_scale;
  j["qst"]["prior_rank"] = cfg.qst.prior_rank;

  switch (cfg.kind) {
    case StudyKind::kQst:
      j["qst_study"]["n_targets"] = cfg.qst_study.n_targets;
      j["qst_study"]["shots_per_setting"] = cfg.qst_study.shots_per_setting;
      break;
    case StudyKind::kThreshold:
      j["threshold"]["thresholds"] = cfg.threshold.thresholds;
      j["threshold"]["n_targets"] = cfg.threshold.n_targets;
      j["threshold"]["shots_min"] = cfg.threshold.shots_min;
      j["threshold"]["shots_max"] = cfg.threshold.shots_max;
      j["threshold"]["points_per_decade"] = cfg.threshold.points_per_decade;
      j["threshold"]["crossing_resamples"] = cfg.threshold.crossing_resamples;
      break;
    case StudyKind::kBudget:
      j["budget"]["total_budget"] = cfg.budget.total_budget;
      j["budget"]["r_grid"] = cfg.budget.r_grid;
      j["budget"]["n_targets"] = cfg.budget.n_targets;
      break;
    case StudyKind::kQrem3:
      j["qrem3"]["shots_per_basis"] = cfg.qrem3.shots_per_basis;
      j["qrem3"]["qdt_shots_per_cell"] = cfg.qrem3.qdt_shots_per_cell;
      j["qrem3"]["target"] = cfg.qrem3.target;
      j["qrem3"]["bootstrap_resamples"] = cfg.qrem3.bootstrap_resamples;
      break;
    case StudyKind::kCorrelation: {
      j["correlation"]["shot_grid"] = cfg.correlation.shot_grid;
      if (!cfg.correlation.amplitudes.empty()) {
        j["correlation"]["amplitudes"] = cfg.correlation.amplitudes;
        j["correlation"]["amplitude_map"]["amplitudes"] = cfg.correlation.amplitude_map.amplitudes;
        j["correlation"]["amplitude_map"]["fidelities"] = cfg.correlation.amplitude_map.fidelities;
      }
      j["correlation"]["baseline_trials"] = cfg.correlation.baseline_trials;
      if (!cfg.correlation.baseline_channels.empty()) {
        nlohmann::json channels = nlohmann::json::array();
        for (const auto& ch : cfg.correlation.baseline_channels) channels.push_back(channel_json(ch));
        j["correlation"]["baseline_channels"] = std::move(channels);
      }
      break;
    }
    case StudyKind::kBaseline: {
      j["baseline"]["shot_grid"] = cfg.baseline.shot_grid;
      j["baseline"]["n_trials"] = cfg.baseline.n_trials;
      if (!cfg.baseline.channels.empty()) {
        nlohmann::json channels = nlohmann::json::array();
        for (const auto& ch : cfg.baseline.channels) channels.push_back(channel_json(ch));
        j["baseline"]["channels"] = std::move(channels);
      }
      break;
    }
    case StudyKind::kQdt:
      break;
  }
  return j;
}

}  // namespace qrb
