#include "tca/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tca/error.hpp"

namespace tca {

using nlohmann::json;

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  return lines;
}

bool parse_double(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size() && std::isfinite(out);
}

[[noreturn]] void bad_model(const std::string& msg) {
  throw Error(ErrorCode::InvalidArgument, "model file: " + msg);
}

Matrix matrix_from_json(const json& j, std::size_t k, const std::string& what) {
  if (!j.is_array()) bad_model(what + " must be an array");
  std::vector<double> values;
  if (!j.empty() && j.front().is_array()) {
    if (j.size() != k) bad_model(what + " must have " + std::to_string(k) + " rows");
    for (const auto& row : j) {
      if (!row.is_array() || row.size() != k) {
        bad_model(what + " rows must have " + std::to_string(k) + " entries");
      }
      for (const auto& v : row) {
        if (!v.is_number()) bad_model(what + " has a non-numeric entry");
        values.push_back(v.get<double>());
      }
    }
  } else {
    if (j.size() != k * k) bad_model(what + " must have " + std::to_string(k * k) + " entries");
    for (const auto& v : j) {
      if (!v.is_number()) bad_model(what + " has a non-numeric entry");
      values.push_back(v.get<double>());
    }
  }
  try {
    return Matrix::from_row_major(k, k, std::move(values));
  } catch (const Error&) {
    bad_model(what + " has non-finite entries");
  }
}

std::vector<Matrix> matrices_from_json(const json& j, std::size_t k, const std::string& what) {
  if (!j.is_array()) bad_model(what + " must be an array of matrices");
  std::vector<Matrix> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(matrix_from_json(j[i], k, what + "[" + std::to_string(i) + "]"));
  }
  return out;
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (double v : m.row(r)) row.push_back(v);
    rows.push_back(std::move(row));
  }
  return rows;
}

json matrices_to_json(const std::vector<Matrix>& ms) {
  json out = json::array();
  for (const auto& m : ms) out.push_back(matrix_to_json(m));
  return out;
}

std::vector<std::string> names_from_json(const json& j, std::size_t k, const char* what) {
  if (!j.is_array() || j.size() != k) {
    bad_model(std::string(what) + " must list " + std::to_string(k) + " names");
  }
  std::vector<std::string> out;
  for (const auto& v : j) {
    if (!v.is_string()) bad_model(std::string(what) + " must be strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

std::size_t count_field(const json& j, const char* key) {
  if (!j.contains(key)) bad_model(std::string("missing field '") + key + "'");
  const json& v = j.at(key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
    bad_model(std::string("field '") + key + "' must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path + "'");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error(ErrorCode::Io, "write to '" + path + "' failed");
}

DataTable parse_csv(std::string_view text) {
  if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
  const auto lines = split_lines(text);
  if (lines.empty()) throw Error(ErrorCode::InvalidArgument, "CSV is empty");
  DataTable t;
  for (auto f : split_fields(lines.front())) {
    if (f.size() >= 2 && f.front() == '"' && f.back() == '"') f = f.substr(1, f.size() - 2);
    if (f.empty()) throw Error(ErrorCode::InvalidArgument, "CSV header has an empty column name");
    t.names.emplace_back(f);
  }
  const std::size_t k = t.names.size();
  std::vector<double> values;
  std::size_t rows = 0;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    if (trim(lines[li]).empty()) continue;
    const auto fields = split_fields(lines[li]);
    if (fields.size() != k) {
      throw Error(ErrorCode::InvalidArgument, "CSV line " + std::to_string(li + 1) + " has " +
                                                  std::to_string(fields.size()) + " fields, expected " +
                                                  std::to_string(k));
    }
    for (std::size_t c = 0; c < k; ++c) {
      double v = 0.0;
      if (!parse_double(fields[c], v)) {
        throw Error(ErrorCode::InvalidArgument, "CSV line " + std::to_string(li + 1) + ", column '" +
                                                    t.names[c] + "': missing or non-numeric value '" +
                                                    std::string(fields[c]) + "'");
      }
      values.push_back(v);
    }
    ++rows;
  }
  t.values = Matrix::from_row_major(rows, k, std::move(values));
  return t;
}

DataTable read_csv(const std::string& path) { return parse_csv(read_file(path)); }

AnyModel parse_model(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    bad_model(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) bad_model("top level must be an object");
  const std::size_t k = count_field(j, "K");
  if (k == 0) bad_model("K must be positive");
  std::vector<std::string> names;
  if (j.contains("var_names")) names = names_from_json(j.at("var_names"), k, "var_names");

  if (j.contains("reduced")) {
    const json& r = j.at("reduced");
    if (!r.is_object()) bad_model("'reduced' must be an object");
    ReducedVar var;
    var.var_names = std::move(names);
    var.p = count_field(r, "p");
    var.has_intercept = r.value("has_intercept", true);
    var.nobs = j.contains("nobs") ? count_field(j, "nobs") : 0;
    if (r.contains("intercept")) {
      const json& c = r.at("intercept");
      if (!c.is_array() || c.size() != k) bad_model("intercept must have K entries");
      for (const auto& v : c) {
        if (!v.is_number()) bad_model("intercept has a non-numeric entry");
        var.intercept.push_back(v.get<double>());
      }
    } else {
      var.intercept.assign(k, 0.0);
    }
    var.coefs = matrices_from_json(r.value("coefs", json::array()), k, "coefs");
    if (var.coefs.size() != var.p) bad_model("p does not match the number of coefficient matrices");
    if (!r.contains("sigma_u")) bad_model("missing field 'sigma_u'");
    var.sigma_u = matrix_from_json(r.at("sigma_u"), k, "sigma_u");
    var.validate();
    return var;
  }

  VarmaModel m;
  m.var_names = std::move(names);
  if (j.contains("shock_names")) m.shock_names = names_from_json(j.at("shock_names"), k, "shock_names");
  if (!j.contains("A0")) bad_model("missing field 'A0' (or 'reduced')");
  m.a0 = matrix_from_json(j.at("A0"), k, "A0");
  m.ar = matrices_from_json(j.value("A", json::array()), k, "A");
  m.ma = matrices_from_json(j.value("Psi", json::array()), k, "Psi");
  if (j.contains("ell") && count_field(j, "ell") != m.ar.size()) bad_model("ell does not match A");
  if (j.contains("q") && count_field(j, "q") != m.ma.size()) bad_model("q does not match Psi");
  m.validate();
  return m;
}

AnyModel load_model(const std::string& path) { return parse_model(read_file(path)); }

std::string model_to_json(const AnyModel& model) {
  json j;
  if (const auto* m = std::get_if<VarmaModel>(&model)) {
    j["K"] = m->k();
    if (!m->var_names.empty()) j["var_names"] = m->var_names;
    if (!m->shock_names.empty()) j["shock_names"] = m->shock_names;
    j["ell"] = m->ell();
    j["q"] = m->q();
    j["A0"] = matrix_to_json(m->a0);
    j["A"] = matrices_to_json(m->ar);
    j["Psi"] = matrices_to_json(m->ma);
  } else {
    const auto& v = std::get<ReducedVar>(model);
    j["K"] = v.k();
    if (!v.var_names.empty()) j["var_names"] = v.var_names;
    j["nobs"] = v.nobs;
    json r;
    r["p"] = v.p;
    r["has_intercept"] = v.has_intercept;
    r["intercept"] = v.intercept;
    r["coefs"] = matrices_to_json(v.coefs);
    r["sigma_u"] = matrix_to_json(v.sigma_u);
    j["reduced"] = std::move(r);
  }
  return j.dump(2) + "\n";
}

void save_model(const std::string& path, const AnyModel& model) {
  write_file(path, model_to_json(model));
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_effects_csv(const EffectTable& table, const std::vector<double>* lower,
                               const std::vector<double>* upper) {
  const std::size_t n = table.size();
  if (table.channel.size() != n || table.complement.size() != n || table.k == 0 ||
      table.labels.size() != table.k || n != (table.h + 1) * table.k) {
    throw Error(ErrorCode::DimensionMismatch, "malformed effect table");
  }
  const bool bands = lower != nullptr && upper != nullptr;
  if (bands && (lower->size() != n || upper->size() != n)) {
    throw Error(ErrorCode::DimensionMismatch, "band vectors do not match the table");
  }
  const double gap = decomposition_gap(table);
  if (!(gap <= kDecompositionTolerance)) {
    throw Error(ErrorCode::DecompositionViolated,
                "channel + complement differs from total by " + format_number(gap));
  }
  std::string out = bands ? "variable,horizon,total,channel,complement,lower,upper\n"
                          : "variable,horizon,total,channel,complement\n";
  for (std::size_t r = 0; r < table.k; ++r) {
    for (std::size_t t = 0; t <= table.h; ++t) {
      const std::size_t m = t * table.k + r;
      out += table.labels[r];
      out += ',' + std::to_string(t);
      out += ',' + format_number(table.total[m]);
      out += ',' + format_number(table.channel[m]);
      out += ',' + format_number(table.complement[m]);
      if (bands) {
        out += ',' + format_number((*lower)[m]);
        out += ',' + format_number((*upper)[m]);
      }
      out += '\n';
    }
  }
  return out;
}

void write_effects_csv(const std::string& path, const EffectTable& table,
                       const std::vector<double>* lower, const std::vector<double>* upper) {
  write_file(path, format_effects_csv(table, lower, upper));
}

VerifyReport verify_effects_text(std::string_view csv, double tol) {
  const auto lines = split_lines(csv);
  if (lines.empty()) throw Error(ErrorCode::InvalidArgument, "effects file is empty");
  const auto header = split_fields(lines.front());
  const char* expected[] = {"variable", "horizon", "total", "channel", "complement"};
  if (header.size() < 5) throw Error(ErrorCode::InvalidArgument, "effects file header is too short");
  for (std::size_t i = 0; i < 5; ++i) {
    if (header[i] != expected[i]) {
      throw Error(ErrorCode::InvalidArgument,
                  "effects file header must start with variable,horizon,total,channel,complement");
    }
  }
  VerifyReport rep;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto f = split_fields(lines[li]);
    if (f.size() != header.size()) {
      throw Error(ErrorCode::InvalidArgument, "effects file line " + std::to_string(li + 1) +
                                                  " has the wrong number of fields");
    }
    double total = 0.0, channel = 0.0, complement = 0.0;
    if (!parse_double(f[2], total) || !parse_double(f[3], channel) ||
        !parse_double(f[4], complement)) {
      throw Error(ErrorCode::InvalidArgument,
                  "effects file line " + std::to_string(li + 1) + " has a non-numeric value");
    }
    ++rep.rows;
    const double gap = std::abs(channel + complement - total) / std::max(1.0, std::abs(total));
    rep.worst = std::max(rep.worst, gap);
    if (!(gap <= tol)) {
      if (rep.failures == 0) rep.first_failure = li + 1;
      ++rep.failures;
    }
  }
  return rep;
}

VerifyReport verify_effects_csv(const std::string& path, double tol) {
  return verify_effects_text(read_file(path), tol);
}

}  // namespace tca
