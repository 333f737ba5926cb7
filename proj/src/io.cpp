#include "cpbm/io.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cpbm {

using nlohmann::json;

namespace {

json vec_to_json(const Vec& v) {
  json arr = json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

Vec vec_from_json(const json& arr) {
  Vec v(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) v(static_cast<int>(i)) = arr[i].get<double>();
  return v;
}

json mat_to_json(const Mat& m) {
  json out;
  out["rows"] = m.rows();
  out["cols"] = m.cols();
  json flat = json::array();
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) flat.push_back(m(i, j));
  out["data"] = flat;
  return out;
}

Mat mat_from_json(const json& j) {
  Mat m(j.at("rows").get<Eigen::Index>(), j.at("cols").get<Eigen::Index>());
  const auto& flat = j.at("data");
  std::size_t t = 0;
  for (Eigen::Index jj = 0; jj < m.cols(); ++jj)
    for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, jj) = flat[t++].get<double>();
  return m;
}

json mlp_to_json(const MlpModel& m) {
  json out;
  out["input_dim"] = m.input_dim;
  out["hidden_dim"] = m.hidden_dim;
  out["output_dim"] = m.output_dim;
  out["W1"] = mat_to_json(m.W1);
  out["b1"] = vec_to_json(m.b1);
  out["W2"] = mat_to_json(m.W2);
  out["b2"] = vec_to_json(m.b2);
  return out;
}

MlpModel mlp_from_json(const json& j) {
  MlpModel m;
  m.input_dim = j.at("input_dim").get<int>();
  m.hidden_dim = j.at("hidden_dim").get<int>();
  m.output_dim = j.at("output_dim").get<int>();
  m.W1 = mat_from_json(j.at("W1"));
  m.b1 = vec_from_json(j.at("b1"));
  m.W2 = mat_from_json(j.at("W2"));
  m.b2 = vec_from_json(j.at("b2"));
  return m;
}

}  // namespace

void write_click_log(std::ostream& out, const ClickLog& log) {
  json header;
  header["K"] = log.K;
  header["dq"] = log.dq;
  header["dd"] = log.dd;
  header["config_hash"] = log.config_hash;
  header["seed"] = log.seed;
  out << header.dump() << '\n';
  for (const auto& rec : log.records) {
    json j;
    j["query_id"] = rec.query_id;
    j["context"] = vec_to_json(rec.context);
    json items = json::array();
    for (const auto& d : rec.items) items.push_back(vec_to_json(d));
    j["items"] = std::move(items);
    j["clicks"] = rec.clicks;
    if (rec.swap) {
      j["swap_parity"] = rec.swap->parity == SwapParity::kOdd ? "odd" : "even";
      j["swapped_pairs"] = rec.swap->swapped_pairs;
    }
    out << j.dump() << '\n';
  }
}

ClickLog read_click_log(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("click log is empty");
  const json header = json::parse(line);
  ClickLog log;
  log.K = header.at("K").get<int>();
  log.dq = header.at("dq").get<int>();
  log.dd = header.at("dd").get<int>();
  log.config_hash = header.at("config_hash").get<std::string>();
  log.seed = header.at("seed").get<std::uint64_t>();
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    ClickRecord rec;
    rec.query_id = j.at("query_id").get<std::int64_t>();
    rec.context = vec_from_json(j.at("context"));
    for (const auto& item : j.at("items")) rec.items.push_back(vec_from_json(item));
    rec.clicks = j.at("clicks").get<std::vector<int>>();
    if (j.contains("swap_parity")) {
      SwapAnnotation ann;
      ann.parity =
          j.at("swap_parity").get<std::string>() == "odd" ? SwapParity::kOdd : SwapParity::kEven;
      ann.swapped_pairs = j.at("swapped_pairs").get<std::vector<int>>();
      rec.swap = std::move(ann);
    }
    log.records.push_back(std::move(rec));
  }
  validate(log);
  return log;
}

void write_click_log(const std::filesystem::path& path, const ClickLog& log) {
  std::ostringstream ss;
  write_click_log(ss, log);
  atomic_write(path, ss.str());
}

ClickLog read_click_log(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open click log: " + path.string());
  return read_click_log(in);
}

void write_bias_predictor(const std::filesystem::path& path, const BiasPredictor& p,
                          const std::string& estimator_name) {
  json j;
  j["estimator"] = estimator_name;
  j["normalization"] = "position-1";
  switch (p.kind) {
    case PredictorKind::kConstantCurve:
      j["kind"] = "constant-curve";
      j["curve"] = vec_to_json(p.curve);
      break;
    case PredictorKind::kContextualNetwork:
      j["kind"] = "contextual-network";
      j["model"] = mlp_to_json(*p.net);
      break;
    case PredictorKind::kPartitionedCurve: {
      j["kind"] = "partitioned-curve";
      j["partition_scheme"] = "device";
      json curves;
      for (const auto& [label, curve] : p.partition_curves)
        curves[label] = vec_to_json(curve);
      j["curves"] = std::move(curves);
      break;
    }
  }
  atomic_write(path, j.dump(2) + "\n");
}

BiasPredictor read_bias_predictor(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open predictor: " + path.string());
  const json j = json::parse(in);
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "constant-curve") return BiasPredictor::from_curve(vec_from_json(j.at("curve")));
  if (kind == "contextual-network") return BiasPredictor::from_net(mlp_from_json(j.at("model")));
  if (kind == "partitioned-curve") {
    BiasPredictor p;
    p.kind = PredictorKind::kPartitionedCurve;
    if (j.at("partition_scheme").get<std::string>() != "device")
      throw std::runtime_error("unknown partition scheme in " + path.string());
    p.partition = device_partition_label;
    for (const auto& [label, curve] : j.at("curves").items())
      p.partition_curves[label] = vec_from_json(curve);
    return p;
  }
  throw std::runtime_error("unknown predictor kind: " + kind);
}

void write_relevance_predictor(const std::filesystem::path& path,
                               const RelevancePredictor& p) {
  json j;
  j["kind"] = "relevance-network";
  j["model"] = mlp_to_json(p.net);
  atomic_write(path, j.dump(2) + "\n");
}

RelevancePredictor read_relevance_predictor(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open predictor: " + path.string());
  const json j = json::parse(in);
  return RelevancePredictor{mlp_from_json(j.at("model"))};
}

std::string render_double(double x) { return json(x).dump(); }

void write_metric_table(const std::filesystem::path& path,
                        const std::vector<MetricRow>& rows) {
  std::ostringstream ss;
  ss << "estimator,eta,device_prob,seed,metric,value,ci_low,ci_high\n";
  for (const auto& r : rows) {
    ss << r.estimator << ',' << render_double(r.eta) << ',';
    if (r.device_prob >= 0.0) ss << render_double(r.device_prob);
    ss << ',';
    if (r.seed >= 0) ss << r.seed;
    ss << ',' << r.metric << ',' << render_double(r.value) << ',';
    if (r.has_ci) ss << render_double(r.ci_low) << ',' << render_double(r.ci_high);
    else ss << ',';
    ss << '\n';
  }
  atomic_write(path, ss.str());
}

void write_trajectory(const std::filesystem::path& path, const std::vector<LtrRow>& rows) {
  std::ostringstream ss;
  ss << "query_index,dcg_at_k,precision_at_k\n";
  for (const auto& r : rows)
    ss << r.query_index << ',' << render_double(r.dcg_at_k) << ','
       << render_double(r.precision_at_k) << '\n';
  atomic_write(path, ss.str());
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const auto tmp = path.parent_path() / (path.filename().string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace cpbm
