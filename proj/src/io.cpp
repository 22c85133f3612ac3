#include "scalefit/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "scalefit/errors.hpp"

namespace scalefit {

namespace {

constexpr const char* kMagic = "SCALEFIT-MODEL v1";

std::string hex(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%a", v);
  return buf;
}

std::string dec(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_real(const std::string& token, Index line) {
  const char* begin = token.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end != begin + token.size() || token.empty()) {
    throw IntegrityError("model file: bad numeric token '" + token + "' on line " +
                         std::to_string(line));
  }
  return v;
}

// --- CSV ---------------------------------------------------------------

std::vector<std::string> split_csv_line(const std::string& line, char delimiter,
                                        Index line_no) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"' && field.empty()) {
      quoted = true;
    } else if (c == delimiter) {
      fields.push_back(field);
      field.clear();
    } else {
      field += c;
    }
  }
  if (quoted) {
    throw IoError("csv: unterminated quote on line " + std::to_string(line_no));
  }
  fields.push_back(field);
  return fields;
}

double parse_csv_number(const std::string& field, Index line_no, Index column) {
  std::string trimmed = field;
  while (!trimmed.empty() && (trimmed.back() == '\r' || trimmed.back() == ' ')) {
    trimmed.pop_back();
  }
  std::size_t start = 0;
  while (start < trimmed.size() && trimmed[start] == ' ') ++start;
  trimmed = trimmed.substr(start);
  if (trimmed.empty()) {
    throw IoError("csv: empty field in column " + std::to_string(column) + " on line " +
                  std::to_string(line_no));
  }
  const char* begin = trimmed.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end != begin + trimmed.size() || !std::isfinite(v)) {
    throw IoError("csv: malformed numeric field '" + field + "' in column " +
                  std::to_string(column) + " on line " + std::to_string(line_no));
  }
  return v;
}

// --- model text format --------------------------------------------------

class LineWriter {
 public:
  void line(const std::string& s) { out_ += s + "\n"; }
  const std::string& str() const { return out_; }

 private:
  std::string out_;
};

class LineReader {
 public:
  explicit LineReader(const std::string& text) : stream_(text) {}

  // Next line split on single spaces. Throws IntegrityError at EOF.
  std::vector<std::string> next(const std::string& expectation) {
    std::string line;
    if (!std::getline(stream_, line)) {
      throw IntegrityError("model file: truncated, expected " + expectation +
                           " after line " + std::to_string(line_no_));
    }
    ++line_no_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> tokens;
    std::string token;
    std::istringstream ls(line);
    while (ls >> token) tokens.push_back(token);
    return tokens;
  }

  std::vector<std::string> expect(const std::string& head, std::size_t min_tokens) {
    auto tokens = next("'" + head + "'");
    if (tokens.empty() || tokens[0] != head || tokens.size() < min_tokens) {
      throw IntegrityError("model file: expected '" + head + "' on line " +
                           std::to_string(line_no_));
    }
    return tokens;
  }

  Index line_no() const { return line_no_; }

 private:
  std::istringstream stream_;
  Index line_no_ = 0;
};

void write_quantile_block(LineWriter& w, const QuantileModel& m) {
  switch (m.kernel.family) {
    case KernelFamily::gaussian_rbf:
      w.line("kernel gaussian_rbf gamma " + hex(m.kernel.gamma));
      break;
    case KernelFamily::linear:
      w.line("kernel linear");
      break;
    case KernelFamily::polynomial:
      w.line("kernel polynomial degree " + std::to_string(m.kernel.degree) + " coef0 " +
             hex(m.kernel.coef0));
      break;
  }
  if (m.loss.family == LossFamily::pinball) {
    w.line("loss pinball tau " + hex(m.loss.tau));
  } else {
    w.line("loss smoothed_pinball tau " + hex(m.loss.tau) + " epsilon " + hex(m.loss.epsilon));
  }
  w.line("lambda " + hex(m.lambda));
  w.line("jitter " + hex(m.jitter));
  w.line("objective " + hex(m.objective_value));
  w.line("solver iterations " + std::to_string(m.report.iterations) + " residual " +
         hex(m.report.residual) + " converged " + std::to_string(m.report.converged ? 1 : 0) +
         " tol " + hex(m.report.tol) + " max_iter " + std::to_string(m.report.max_iter) +
         " seed " + std::to_string(m.report.seed));
  w.line("points " + std::to_string(m.train_inputs.rows()) + " dim " +
         std::to_string(m.train_inputs.cols()));
  for (Index i = 0; i < m.train_inputs.rows(); ++i) {
    std::string row = "x";
    for (Index j = 0; j < m.train_inputs.cols(); ++j) row += " " + hex(m.train_inputs(i, j));
    w.line(row);
  }
  std::string betas = "beta";
  for (Index i = 0; i < m.coefficients.size(); ++i) betas += " " + hex(m.coefficients[i]);
  w.line(betas);
}

QuantileModel read_quantile_block(LineReader& r) {
  QuantileModel m;
  auto kernel_tokens = r.expect("kernel", 2);
  const std::string family = kernel_tokens[1];
  if (family == "gaussian_rbf") {
    if (kernel_tokens.size() < 4 || kernel_tokens[2] != "gamma") {
      throw IntegrityError("model file: bad kernel line " + std::to_string(r.line_no()));
    }
    m.kernel = KernelSpec::rbf(parse_real(kernel_tokens[3], r.line_no()));
  } else if (family == "linear") {
    m.kernel = KernelSpec::lin();
  } else if (family == "polynomial") {
    if (kernel_tokens.size() < 6 || kernel_tokens[2] != "degree" || kernel_tokens[4] != "coef0") {
      throw IntegrityError("model file: bad kernel line " + std::to_string(r.line_no()));
    }
    m.kernel = KernelSpec::poly(static_cast<int>(std::stol(kernel_tokens[3])),
                                parse_real(kernel_tokens[5], r.line_no()));
  } else {
    throw IntegrityError("model file: unknown kernel family '" + family + "' on line " +
                         std::to_string(r.line_no()));
  }

  auto loss_tokens = r.expect("loss", 4);
  m.loss.family = loss_family_from_string(loss_tokens[1]);
  m.loss.tau = parse_real(loss_tokens[3], r.line_no());
  if (m.loss.family == LossFamily::smoothed_pinball) {
    if (loss_tokens.size() < 6 || loss_tokens[4] != "epsilon") {
      throw IntegrityError("model file: bad loss line " + std::to_string(r.line_no()));
    }
    m.loss.epsilon = parse_real(loss_tokens[5], r.line_no());
  }

  m.lambda = parse_real(r.expect("lambda", 2)[1], r.line_no());
  m.jitter = parse_real(r.expect("jitter", 2)[1], r.line_no());
  m.objective_value = parse_real(r.expect("objective", 2)[1], r.line_no());

  auto solver_tokens = r.expect("solver", 13);
  m.report.iterations = static_cast<int>(std::stol(solver_tokens[2]));
  m.report.residual = parse_real(solver_tokens[4], r.line_no());
  m.report.converged = solver_tokens[6] == "1";
  m.report.tol = parse_real(solver_tokens[8], r.line_no());
  m.report.max_iter = static_cast<int>(std::stol(solver_tokens[10]));
  m.report.seed = std::stoull(solver_tokens[12]);

  auto size_tokens = r.expect("points", 4);
  const Index n = static_cast<Index>(std::stol(size_tokens[1]));
  const Index d = static_cast<Index>(std::stol(size_tokens[3]));
  if (n < 0 || d < 0) throw IntegrityError("model file: negative dimensions");
  m.train_inputs.resize(n, d);
  for (Index i = 0; i < n; ++i) {
    auto row = r.expect("x", static_cast<std::size_t>(d) + 1);
    for (Index j = 0; j < d; ++j) {
      m.train_inputs(i, j) = parse_real(row[static_cast<std::size_t>(j) + 1], r.line_no());
    }
  }
  auto beta_tokens = r.expect("beta", static_cast<std::size_t>(n) + 1);
  m.coefficients.resize(n);
  for (Index i = 0; i < n; ++i) {
    m.coefficients[i] = parse_real(beta_tokens[static_cast<std::size_t>(i) + 1], r.line_no());
  }
  return m;
}

}  // namespace

Dataset load_csv(const DatasetFile& file) {
  std::ifstream in(file.path);
  if (!in) throw IoError("cannot open '" + file.path + "' for reading");

  std::vector<std::vector<double>> rows;
  std::string line;
  Index line_no = 0;
  Index width = -1;
  bool header_pending = file.has_header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (header_pending) {
      header_pending = false;
      continue;
    }
    const auto fields = split_csv_line(line, file.delimiter, line_no);
    if (width < 0) {
      width = static_cast<Index>(fields.size());
    } else if (static_cast<Index>(fields.size()) != width) {
      throw IoError("csv: line " + std::to_string(line_no) + " has " +
                    std::to_string(fields.size()) + " fields, expected " + std::to_string(width));
    }
    std::vector<double> row;
    row.reserve(fields.size());
    for (std::size_t c = 0; c < fields.size(); ++c) {
      row.push_back(parse_csv_number(fields[c], line_no, static_cast<Index>(c)));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw IoError("csv: '" + file.path + "' contains no data rows");

  const Index y_col = file.y_column >= 0 ? file.y_column : width - 1;
  if (y_col >= width) {
    throw IoError("csv: y column " + std::to_string(y_col) + " out of range (file has " +
                  std::to_string(width) + " columns)");
  }
  std::vector<Index> x_cols = file.x_columns;
  if (x_cols.empty()) {
    for (Index c = 0; c < width; ++c) {
      if (c != y_col) x_cols.push_back(c);
    }
  }
  if (x_cols.empty()) throw IoError("csv: no x columns remain");
  for (const Index c : x_cols) {
    if (c < 0 || c >= width) {
      throw IoError("csv: x column " + std::to_string(c) + " out of range (file has " +
                    std::to_string(width) + " columns)");
    }
    if (c == y_col) {
      throw IoError("csv: y column " + std::to_string(c) + " also listed as an x column");
    }
  }

  Dataset data;
  data.x.resize(static_cast<Index>(rows.size()), static_cast<Index>(x_cols.size()));
  data.y.resize(static_cast<Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < x_cols.size(); ++j) {
      data.x(static_cast<Index>(i), static_cast<Index>(j)) =
          rows[i][static_cast<std::size_t>(x_cols[j])];
    }
    data.y[static_cast<Index>(i)] = rows[i][static_cast<std::size_t>(y_col)];
  }
  return data;
}

void write_csv(std::ostream& out, const Dataset& data) {
  for (Index j = 0; j < data.dim(); ++j) out << "x" << (j + 1) << ",";
  out << "y\n";
  for (Index i = 0; i < data.n(); ++i) {
    for (Index j = 0; j < data.dim(); ++j) out << dec(data.x(i, j)) << ",";
    out << dec(data.y[i]) << "\n";
  }
}

void write_csv(const std::string& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_csv(out, data);
  if (!out) throw IoError("write to '" + path + "' failed");
}

std::string serialize_model(const Model& model) {
  LineWriter w;
  w.line(kMagic);
  if (const auto* q = std::get_if<QuantileModel>(&model)) {
    w.line("kind quantile");
    write_quantile_block(w, *q);
  } else if (const auto* c = std::get_if<CombinationModel>(&model)) {
    w.line("kind combination");
    w.line("parts " + std::to_string(c->parts.size()));
    std::string weights = "weights";
    for (const double v : c->weights) weights += " " + hex(v);
    w.line(weights);
    std::string taus = "taus";
    for (const double v : c->taus) taus += " " + hex(v);
    w.line(taus);
    for (std::size_t j = 0; j < c->parts.size(); ++j) {
      w.line("part " + std::to_string(j));
      write_quantile_block(w, c->parts[j]);
    }
  } else {
    const auto& m = std::get<MadModel>(model);
    w.line("kind mad");
    w.line("epsilon " + hex(m.epsilon));
    w.line("clip_at_zero " + std::to_string(m.clip_at_zero ? 1 : 0));
    w.line("median");
    write_quantile_block(w, m.median_model);
    w.line("residual");
    write_quantile_block(w, m.residual_model);
  }
  w.line("end");
  return w.str();
}

Model parse_model(const std::string& text) {
  LineReader r(text);
  auto magic = r.next("format header");
  std::string joined;
  for (std::size_t i = 0; i < magic.size(); ++i) joined += (i ? " " : "") + magic[i];
  if (joined != kMagic) {
    throw VersionError("model file: unsupported format header '" + joined + "', expected '" +
                       kMagic + "'");
  }
  auto kind_tokens = r.expect("kind", 2);
  const std::string kind = kind_tokens[1];
  Model model;
  if (kind == "quantile") {
    model = read_quantile_block(r);
  } else if (kind == "combination") {
    CombinationModel c;
    const auto count_tokens = r.expect("parts", 2);
    const auto m = static_cast<std::size_t>(std::stol(count_tokens[1]));
    const auto weight_tokens = r.expect("weights", m + 1);
    const auto tau_tokens = r.expect("taus", m + 1);
    for (std::size_t j = 0; j < m; ++j) {
      c.weights.push_back(parse_real(weight_tokens[j + 1], r.line_no()));
      c.taus.push_back(parse_real(tau_tokens[j + 1], r.line_no()));
    }
    for (std::size_t j = 0; j < m; ++j) {
      r.expect("part", 2);
      c.parts.push_back(read_quantile_block(r));
      if (c.parts.back().loss.tau != c.taus[j]) {
        throw IntegrityError("model file: part " + std::to_string(j) +
                             " tau disagrees with the taus line");
      }
    }
    model = std::move(c);
  } else if (kind == "mad") {
    MadModel m;
    m.epsilon = parse_real(r.expect("epsilon", 2)[1], r.line_no());
    m.clip_at_zero = r.expect("clip_at_zero", 2)[1] == "1";
    r.expect("median", 1);
    m.median_model = read_quantile_block(r);
    r.expect("residual", 1);
    m.residual_model = read_quantile_block(r);
    model = std::move(m);
  } else {
    throw IntegrityError("model file: unknown kind '" + kind + "'");
  }
  r.expect("end", 1);
  return model;
}

void save_model(const std::string& path, const Model& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << serialize_model(model);
  if (!out) throw IoError("write to '" + path + "' failed");
}

Model load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_model(buffer.str());
}

double predict_any(const Model& model, ConstVectorRef x) {
  if (const auto* q = std::get_if<QuantileModel>(&model)) return predict(*q, x);
  if (const auto* c = std::get_if<CombinationModel>(&model)) return predict_scale(*c, x);
  return predict_scale(std::get<MadModel>(model), x);
}

}  // namespace scalefit
