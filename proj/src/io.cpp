#include "entineq/io.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <fstream>
#include <sstream>

namespace entineq::io {

namespace {

std::string at(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
std::string at(const std::string& path, std::size_t idx) { return path + "[" + std::to_string(idx) + "]"; }

const json& field(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) throw ParseError(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(at(path, key), "missing field");
  return *it;
}

Index read_count(const json& v, const std::string& path) {
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) throw ParseError(path, "expected a nonnegative integer");
  return static_cast<Index>(v.get<std::int64_t>());
}

double read_real(const json& v, const std::string& path) {
  if (!v.is_number()) throw ParseError(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ParseError(path, "expected a finite number");
  return x;
}

const json& read_array(const json& v, const std::string& path) {
  if (!v.is_array()) throw ParseError(path, "expected an array");
  return v;
}

std::vector<double> read_reals(const json& v, const std::string& path) {
  std::vector<double> out;
  const json& arr = read_array(v, path);
  for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(read_real(arr[i], at(path, i)));
  return out;
}

std::vector<Index> read_counts(const json& v, const std::string& path) {
  std::vector<Index> out;
  const json& arr = read_array(v, path);
  for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(read_count(arr[i], at(path, i)));
  return out;
}

/// Nested rows or a flat row-major array of rows * cols entries.
Mat read_matrix(const json& v, Index rows, Index cols, const std::string& path) {
  const json& arr = read_array(v, path);
  Mat m(rows, cols);
  const auto r = static_cast<std::size_t>(rows);
  const auto c = static_cast<std::size_t>(cols);
  if (!arr.empty() && arr.front().is_array()) {
    if (arr.size() != r)
      throw ParseError(path, "expected " + std::to_string(rows) + " rows, found " + std::to_string(arr.size()));
    for (std::size_t i = 0; i < r; ++i) {
      const json& row = read_array(arr[i], at(path, i));
      if (row.size() != c)
        throw ParseError(at(path, i),
                         "expected " + std::to_string(cols) + " columns, found " + std::to_string(row.size()));
      for (std::size_t j = 0; j < c; ++j)
        m(static_cast<Index>(i), static_cast<Index>(j)) = read_real(row[j], at(at(path, i), j));
    }
    return m;
  }
  if (arr.size() != r * c)
    throw ParseError(path, "expected " + std::to_string(r * c) + " entries (" + std::to_string(rows) + " x " +
                               std::to_string(cols) + " row-major), found " + std::to_string(arr.size()));
  for (std::size_t i = 0; i < r * c; ++i)
    m(static_cast<Index>(i / c), static_cast<Index>(i % c)) = read_real(arr[i], at(path, i));
  return m;
}

void check_schema(const json& doc) {
  const json& v = field(doc, "schema_version", "");
  if (!v.is_string() || v.get<std::string>() != kSchemaVersion)
    throw ParseError("schema_version", std::string("expected \"") + kSchemaVersion + "\"");
}

}  // namespace

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("", "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 15]);
  }
  return out;
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("", std::string("invalid JSON: ") + e.what());
  }
}

Datum datum_from_json(const json& doc) {
  check_schema(doc);
  Datum d;
  const Index k = read_count(field(doc, "k", ""), "k");
  const Index m = read_count(field(doc, "m", ""), "m");
  d.n = read_counts(field(doc, "n", ""), "n");
  d.p = read_counts(field(doc, "p", ""), "p");
  d.c = read_reals(field(doc, "c", ""), "c");
  d.d = read_reals(field(doc, "d", ""), "d");
  if (k < 1) throw ParseError("k", "expected at least one source space");
  if (static_cast<Index>(d.n.size()) != k) throw ParseError("n", "expected k = " + std::to_string(k) + " entries");
  if (static_cast<Index>(d.c.size()) != k) throw ParseError("c", "expected k = " + std::to_string(k) + " entries");
  if (static_cast<Index>(d.p.size()) != m) throw ParseError("p", "expected m = " + std::to_string(m) + " entries");
  if (static_cast<Index>(d.d.size()) != m) throw ParseError("d", "expected m = " + std::to_string(m) + " entries");
  for (std::size_t i = 0; i < d.n.size(); ++i)
    if (d.n[i] < 1) throw ParseError(at("n", i), "dimension must be positive");
  for (std::size_t j = 0; j < d.p.size(); ++j)
    if (d.p[j] < 1) throw ParseError(at("p", j), "dimension must be positive");
  const json& bs = read_array(field(doc, "B", ""), "B");
  if (static_cast<Index>(bs.size()) != m) throw ParseError("B", "expected m = " + std::to_string(m) + " matrices");
  const Index total = d.total_dim();
  for (std::size_t j = 0; j < bs.size(); ++j) d.B.push_back(read_matrix(bs[j], d.p[j], total, at("B", j)));
  return d;
}

json matrix_to_json(const Mat& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(number(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

json datum_to_json(const Datum& datum) {
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["k"] = datum.k();
  doc["m"] = datum.m();
  doc["n"] = datum.n;
  doc["p"] = datum.p;
  doc["c"] = datum.c;
  doc["d"] = datum.d;
  json bs = json::array();
  for (const auto& b : datum.B) bs.push_back(matrix_to_json(b));
  doc["B"] = std::move(bs);
  return doc;
}

ProductDistribution distribution_from_json(const json& doc) {
  check_schema(doc);
  const json& factors = read_array(field(doc, "factors", ""), "factors");
  if (factors.empty()) throw ParseError("factors", "expected at least one factor");
  ProductDistribution dist;
  for (std::size_t i = 0; i < factors.size(); ++i) {
    const std::string fpath = at("factors", i);
    const json& comps = read_array(factors[i], fpath);
    if (comps.empty()) throw ParseError(fpath, "expected at least one component");
    std::vector<Component> parsed;
    for (std::size_t c = 0; c < comps.size(); ++c) {
      const std::string cpath = at(fpath, c);
      const double w = read_real(field(comps[c], "weight", cpath), at(cpath, "weight"));
      if (!(w > 0.0)) throw ParseError(at(cpath, "weight"), "weight must be positive");
      const std::vector<double> mean = read_reals(field(comps[c], "mean", cpath), at(cpath, "mean"));
      if (mean.empty()) throw ParseError(at(cpath, "mean"), "expected a nonempty mean");
      const auto dim = static_cast<Index>(mean.size());
      const Mat cov = read_matrix(field(comps[c], "covariance", cpath), dim, dim, at(cpath, "covariance"));
      try {
        parsed.push_back(Component{w, Eigen::Map<const Vec>(mean.data(), dim), PdMat(cov)});
      } catch (const LinalgError& e) {
        throw ParseError(at(cpath, "covariance"), e.what());
      }
    }
    try {
      dist.factors.emplace_back(std::move(parsed));
    } catch (const std::invalid_argument& e) {
      throw ParseError(fpath, e.what());
    }
  }
  return dist;
}

json distribution_to_json(const ProductDistribution& dist) {
  json doc;
  doc["schema_version"] = kSchemaVersion;
  json factors = json::array();
  for (const auto& f : dist.factors) {
    json comps = json::array();
    for (const auto& c : f.components()) {
      json comp;
      comp["weight"] = number(c.weight);
      comp["mean"] = std::vector<double>(c.mean.data(), c.mean.data() + c.mean.size());
      comp["covariance"] = matrix_to_json(c.cov.matrix());
      comps.push_back(std::move(comp));
    }
    factors.push_back(std::move(comps));
  }
  doc["factors"] = std::move(factors);
  return doc;
}

SymMat sigma_from_json(const json& doc, Index n) {
  const bool wrapped = doc.is_object();
  if (wrapped) check_schema(doc);
  const std::string path = wrapped ? "sigma" : "";
  const json& body = wrapped ? field(doc, "sigma", "") : doc;
  const Mat m = read_matrix(body, n, n, path);
  try {
    return SymMat(m);
  } catch (const LinalgError& e) {
    throw ParseError(path, e.what());
  }
}

json number(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

json subspace_to_json(const Subspace& s) {
  json out;
  out["ambient"] = s.ambient();
  out["dim"] = s.dim();
  out["basis"] = matrix_to_json(s.basis().transpose());  // one row per basis vector
  return out;
}

json product_subspace_to_json(const ProductSubspace& t) {
  json parts = json::array();
  for (const auto& p : t.parts) parts.push_back(subspace_to_json(p));
  return json{{"parts", std::move(parts)}};
}

json block_pd_to_json(const BlockPd& k) {
  json blocks = json::array();
  for (const auto& b : k.blocks()) blocks.push_back(matrix_to_json(b.matrix()));
  return blocks;
}

json dimension_check_to_json(const DimensionCheck& check) {
  json out;
  out["candidates"] = check.candidates;
  out["exhaustive_coordinates"] = check.exhaustive_coordinates;
  if (check.witness) {
    out["result"] = "violation";
    json w;
    w["subspace"] = product_subspace_to_json(check.witness->subspace);
    w["lhs"] = number(check.witness->lhs);
    w["rhs"] = number(check.witness->rhs);
    w["stage"] = check.witness->stage;
    out["witness"] = std::move(w);
  } else {
    out["result"] = "no-violation-found";
  }
  return out;
}

json geometric_check_to_json(const GeometricCheck& check) {
  json out;
  out["geometric"] = check.geometric;
  json src = json::array(), tgt = json::array();
  for (double r : check.source_residuals) src.push_back(number(r));
  for (double r : check.target_residuals) tgt.push_back(number(r));
  out["source_residuals"] = std::move(src);
  out["target_residuals"] = std::move(tgt);
  return out;
}

json solve_to_json(const SolveResult& solve) {
  json out;
  out["status"] = to_string(solve.status);
  out["iterations"] = solve.iterations;
  out["newton_steps"] = solve.newton_steps;
  out["residual"] = number(solve.residual);
  out["objective"] = number(solve.objective);
  out["K"] = block_pd_to_json(solve.k);
  json trace;
  const auto& t = solve.objective_trace;
  trace["length"] = t.size();
  if (!t.empty()) {
    trace["first"] = number(t.front());
    trace["last"] = number(t.back());
    trace["max"] = number(*std::max_element(t.begin(), t.end()));
  }
  out["objective_trace"] = std::move(trace);
  return out;
}

json best_constant_to_json(const BestConstant& bc) {
  json out;
  out["kind"] = to_string(bc.kind);
  out["value"] = number(bc.value);
  out["reason"] = bc.reason;
  out["scaling"] = json{{"holds", bc.scaling.holds}, {"defect", number(bc.scaling.defect)}};
  if (bc.certificate) out["certificate_K"] = block_pd_to_json(*bc.certificate);
  if (bc.witness) {
    DimensionCheck dc;
    dc.witness = bc.witness;
    out["witness"] = dimension_check_to_json(dc)["witness"];
  }
  if (bc.solve) out["solve"] = solve_to_json(*bc.solve);
  return out;
}

json structure_to_json(const StructureReport& report) {
  json out;
  json inds = json::array();
  for (const auto& ind : report.independents) {
    json s;
    s["coordinate"] = ind.i;
    json signs = json::array();
    for (bool b : ind.signs) signs.push_back(b ? "E" : "perp");
    s["signs"] = std::move(signs);
    s["space"] = subspace_to_json(ind.space);
    inds.push_back(std::move(s));
  }
  out["independent_subspaces"] = std::move(inds);
  json per = json::array();
  for (const auto& row : report.per_coordinate) {
    json r = json::array();
    for (const auto& s : row) r.push_back(subspace_to_json(s));
    per.push_back(std::move(r));
  }
  out["per_coordinate"] = std::move(per);
  out["K_dep"] = subspace_to_json(report.dependent.k_dep);
  json parts = json::array();
  for (const auto& p : report.critical_parts) {
    json j;
    j["space"] = subspace_to_json(p.space);
    j["variance"] = number(p.variance);
    j["lhs"] = number(p.check.lhs);
    j["rhs"] = number(p.check.rhs);
    parts.push_back(std::move(j));
  }
  out["critical_parts"] = std::move(parts);
  json factors = json::array();
  for (const auto& f : report.factors) {
    json j;
    j["coordinate"] = f.i;
    j["kind"] = to_string(f.kind);
    j["dim"] = f.space.dim();
    if (f.part) j["critical_part"] = *f.part;
    j["text"] = f.text;
    factors.push_back(std::move(j));
  }
  out["factors"] = std::move(factors);
  out["gaussian_only"] = report.gaussian_only();
  return out;
}

json target_check_to_json(const TargetDecompositionCheck& check) {
  json out;
  out["ok"] = check.ok;
  json t = json::array(), p = json::array();
  for (double r : check.target_residuals) t.push_back(number(r));
  for (double r : check.part_residuals) p.push_back(number(r));
  out["target_residuals"] = std::move(t);
  out["part_residuals"] = std::move(p);
  return out;
}

json deficit_to_json(const DeficitEstimate& d) {
  return json{{"value", number(d.value)}, {"se", number(d.se)}, {"exact", d.exact}};
}

json extremal_to_json(const ExtremalCheck& check) {
  json out;
  out["verdict"] = check.verdict;
  out["independence_ok"] = check.independence_ok;
  out["max_cross_cov"] = number(check.max_cross_cov);
  out["gaussian_dep_ok"] = check.gaussian_dep_ok;
  if (!check.dep_reason.empty()) out["dep_reason"] = check.dep_reason;
  json parts = json::array();
  for (const auto& p : check.induced_parts)
    parts.push_back(json{{"dim", p.space.dim()}, {"variance", number(p.variance)}});
  out["induced_parts"] = std::move(parts);
  out["deficit"] = deficit_to_json(check.deficit);
  out["cross_validated"] = check.cross_validated;
  out["note"] = check.note;
  return out;
}

}  // namespace entineq::io
