#include "blq/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cmath>
#include <fstream>
#include <regex>
#include <sstream>

namespace blq {

namespace {

const char* kModule = "config";

[[noreturn]] void bad(const std::string& msg) { fail(kModule, ErrorCode::InvalidArgument, msg); }

double to_double(const std::string& tok) {
  std::size_t pos = 0;
  double x = 0.0;
  try {
    x = std::stod(tok, &pos);
  } catch (const std::exception&) {
    bad("not a number: '" + tok + "'");
  }
  if (pos != tok.size()) bad("not a number: '" + tok + "'");
  return x;
}

std::vector<double> numbers(const std::string& text) {
  std::istringstream is(text);
  std::vector<double> out;
  std::string tok;
  while (is >> tok) out.push_back(to_double(tok));
  return out;
}

// One matrix term: either "[v v v ...]" (row-major) or a single number
// (a multiple of the identity on square shapes).
Mat term_matrix(const std::string& tok, int rows, int cols) {
  std::string body = tok;
  const bool bracketed = !body.empty() && body.front() == '[';
  if (bracketed) {
    if (body.back() != ']') bad("unterminated matrix '" + tok + "'");
    body = body.substr(1, body.size() - 2);
  }
  const std::vector<double> v = numbers(body);
  if (v.size() == 1 && rows == cols) return v[0] * Mat::Identity(rows, cols);
  if (static_cast<int>(v.size()) != rows * cols) {
    std::ostringstream os;
    os << "expected " << rows * cols << " values for a " << rows << "x" << cols << " matrix, got " << v.size();
    bad(os.str());
  }
  Mat m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = v[i * cols + j];
  return m;
}

// Splits "[..] [..] x" into groups; bare numbers are groups of their own.
std::vector<std::string> term_groups(const std::string& text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (std::isspace(static_cast<unsigned char>(text[i]))) {
      ++i;
      continue;
    }
    if (text[i] == '[') {
      const std::size_t j = text.find(']', i);
      if (j == std::string::npos) bad("unterminated matrix in '" + text + "'");
      out.push_back(text.substr(i, j - i + 1));
      i = j + 1;
    } else {
      std::size_t j = i;
      while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
      out.push_back(text.substr(i, j - i));
      i = j;
    }
  }
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<TerminalTerm> parse_terms(const std::string& text) {
  static const std::regex re(
      R"(^\s*([-+0-9.eE]+)\s*\*\s*(sin|cos|lin)\(\s*([-+0-9.eE]+)\s*\*\s*W([12])\s*\)\s*$)");
  std::vector<TerminalTerm> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (trim(item).empty()) continue;
    std::smatch m;
    if (!std::regex_match(item, m, re)) bad("cannot parse terminal term '" + trim(item) + "'");
    TerminalTerm t;
    t.coef = to_double(m[1]);
    t.func = m[2] == "sin" ? TerminalTerm::Func::Sin : m[2] == "cos" ? TerminalTerm::Func::Cos
                                                                       : TerminalTerm::Func::Linear;
    t.freq = to_double(m[3]);
    t.brownian = m[4] == "1" ? 1 : 2;
    out.push_back(t);
  }
  return out;
}

}  // namespace

Coefficient parse_coefficient(const std::string& raw, int rows, int cols) {
  const std::string text = trim(raw);
  if (text.empty()) bad("empty coefficient");
  std::istringstream is(text);
  std::string head;
  is >> head;
  if (head == "poly") {
    std::vector<Mat> terms;
    for (const auto& g : term_groups(text.substr(4))) terms.push_back(term_matrix(g, rows, cols));
    if (terms.empty()) bad("polynomial needs at least one term");
    return Coefficient::polynomial(std::move(terms));
  }
  if (head == "exp") {
    const auto groups = term_groups(text.substr(3));
    if (groups.size() != 2) bad("exp coefficient needs a rate and one matrix");
    return Coefficient::exp_scalar(to_double(groups[0]), term_matrix(groups[1], rows, cols));
  }
  const auto groups = term_groups(text);
  if (groups.size() == 1) return Coefficient::constant(term_matrix(groups[0], rows, cols));
  return Coefficient::constant(term_matrix("[" + text + "]", rows, cols));
}

LoadedConfig parse_config(const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  // inline comments (; or #) are stripped before parsing
  std::ostringstream clean;
  {
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) clean << line.substr(0, line.find_first_of(";#")) << '\n';
  }
  std::istringstream is(clean.str());
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    bad(std::string("malformed config: ") + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  LoadedConfig out;
  ProblemSpec& spec = out.spec;
  try {
    const auto& prob = tree.get_child("problem");
    spec.name = prob.get<std::string>("name", "config");
    spec.n = prob.get<int>("n", 1);
    spec.m = prob.get<int>("m", 1);
    if (spec.n < 1 || spec.m < 1 || spec.n > kMaxDim || spec.m > kMaxDim)
      bad("dimensions must satisfy 1 <= n, m <= 32");
    const int n = spec.n, m = spec.m;
    auto coef = [&](const char* key, int r, int c, bool required) {
      const auto v = prob.get_optional<std::string>(key);
      if (!v) {
        if (required) bad(std::string("missing coefficient ") + key);
        return Coefficient::constant(Mat::Zero(r, c));
      }
      return parse_coefficient(*v, r, c);
    };
    spec.A = coef("A", n, n, false);
    spec.B = coef("B", n, m, false);
    spec.C1 = coef("C1", n, n, false);
    spec.C2 = coef("C2", n, n, false);
    spec.H = coef("H", n, n, false);
    spec.R = coef("R", m, m, true);
    spec.N1 = coef("N1", n, n, false);
    spec.N2 = coef("N2", n, n, false);
    const Coefficient G = coef("G", n, n, false);
    if (G.kind() != Coefficient::Kind::Constant) bad("G must be a constant matrix");
    spec.G = G.terms().front();

    const double T = tree.get<double>("grid.T", 1.0);
    const auto dt = tree.get_optional<double>("grid.dt");
    if (dt) out.dt = *dt;
    spec.grid = dt ? TimeGrid::with_step(T, *dt) : TimeGrid(T, 256);

    const auto term = tree.get_child_optional("terminal");
    const std::string kind = term ? term->get<std::string>("kind", "zero") : "zero";
    if (kind == "zero") {
      spec.terminal = TerminalSpec::zero();
    } else if (kind == "lognormal") {
      spec.terminal = TerminalSpec::lognormal(term->get<double>("a", 0.0), term->get<double>("b", 0.0),
                                              term->get<double>("c", 0.0));
    } else if (kind == "smooth") {
      spec.terminal = TerminalSpec::smooth(term->get<double>("constant", 0.0),
                                           parse_terms(term->get<std::string>("terms", "")));
    } else {
      bad("unknown terminal kind '" + kind + "'");
    }
    if (term) {
      if (const auto d = term->get_optional<std::string>("direction")) {
        const std::vector<double> v = numbers(*d);
        spec.terminal.direction = Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
      }
    }
  } catch (const pt::ptree_error& e) {
    bad(std::string("config: ") + e.what());
  }
  return out;
}

LoadedConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(kModule, ErrorCode::Io, "cannot read config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace blq
