#include "tsg/config.hpp"

#include "tsg/error.hpp"
#include "tsg/number_format.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace tsg {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

class ScaleLiteralParser {
public:
  explicit ScaleLiteralParser(std::string_view src) : src_(src) {}

  TimeScale parse() {
    std::vector<Segment> items;
    for (;;) {
      skip_ws();
      parse_item(items);
      skip_ws();
      if (pos_ == src_.size())
        break;
      expect(';');
    }
    try {
      return TimeScale::from_union(std::move(items));
    } catch (const DomainError& e) {
      throw ParseError(0, {}, std::string("invalid time scale: ") + e.what());
    }
  }

private:
  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_])))
      ++pos_;
  }

  [[noreturn]] void fail(const std::string& expected) const {
    throw ParseError(pos_, {expected},
                     "time scale literal: expected " + expected + " at offset " + std::to_string(pos_));
  }

  void expect(char c) {
    skip_ws();
    if (pos_ >= src_.size() || src_[pos_] != c)
      fail(std::string("'") + c + "'");
    ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  double number() {
    skip_ws();
    const char* first = src_.data() + pos_;
    double v = 0.0;
    auto [end, ec] = std::from_chars(first, src_.data() + src_.size(), v);
    if (ec != std::errc{} || !std::isfinite(v))
      fail("number");
    pos_ += std::size_t(end - first);
    return v;
  }

  void parse_item(std::vector<Segment>& items) {
    if (accept('[')) {
      const double lo = number();
      expect(',');
      const double hi = number();
      expect(']');
      if (lo > hi)
        throw ParseError(pos_, {}, "interval [" + format_double(lo) + "," + format_double(hi) + "] has lo > hi");
      items.push_back({lo, hi});
    } else if (accept('{')) {
      do {
        const double p = number();
        items.push_back({p, p});
      } while (accept(','));
      expect('}');
    } else if (src_.substr(pos_).starts_with("lattice")) {
      const std::size_t at = pos_;
      pos_ += 7;
      expect('(');
      const double lo = number();
      expect(',');
      const double hi = number();
      expect(',');
      const double step = number();
      expect(')');
      if (!(step > 0.0) || lo > hi)
        throw ParseError(at, {}, "lattice needs lo <= hi and step > 0");
      const auto n = long(std::floor((hi - lo) / step + 1e-9));
      for (long k = 0; k <= n; ++k) {
        const double p = lo + double(k) * step;
        items.push_back({p, p});
      }
    } else {
      fail("'[', '{' or 'lattice('");
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

double parse_real(const std::string& field, std::string_view value, const std::string& where) {
  double v = 0.0;
  auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (value.empty() || ec != std::errc{} || end != value.data() + value.size() || !std::isfinite(v))
    throw ValidationError(field, where + ": field '" + field + "' expects a number, got '" +
                                     std::string(value) + "'");
  return v;
}

long parse_int(const std::string& field, std::string_view value, const std::string& where) {
  long v = 0;
  auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (value.empty() || ec != std::errc{} || end != value.data() + value.size())
    throw ValidationError(field, where + ": field '" + field + "' expects an integer, got '" +
                                     std::string(value) + "'");
  return v;
}

struct Entry {
  std::string value;
  std::string where;
};

} // namespace

TimeScale parse_time_scale(std::string_view src) { return ScaleLiteralParser(src).parse(); }

RunConfig parse_config(std::string_view text, const std::string& origin) {
  static const char* const kKeys[] = {
      "scale1",   "scale2",  "rhs",    "dim",          "h",       "delta",   "tol",
      "max_iter", "bound_G", "bound_g0", "solution_csv", "report", "study_csv", "study_h",
      "probe_x",  "probe_y", "probe_component", "oracle"};

  std::map<std::string, Entry> entries;
  std::istringstream in{std::string(text)};
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    std::string_view body = line;
    if (auto hash = body.find('#'); hash != std::string_view::npos)
      body = body.substr(0, hash);
    body = trim(body);
    if (body.empty())
      continue;
    const std::string where = origin + ":" + std::to_string(lineno);
    const auto eq = body.find('=');
    if (eq == std::string_view::npos)
      throw ValidationError("", where + ": expected 'key = value'");
    const std::string key(trim(body.substr(0, eq)));
    bool known = false;
    for (const char* k : kKeys)
      known = known || key == k;
    if (!known)
      throw ValidationError(key, where + ": unknown field '" + key + "'");
    if (entries.count(key))
      throw ValidationError(key, where + ": field '" + key + "' given twice");
    entries[key] = {std::string(trim(body.substr(eq + 1))), where};
  }

  const auto require = [&](const std::string& key) -> const Entry& {
    auto it = entries.find(key);
    if (it == entries.end())
      throw ValidationError(key, origin + ": missing required field '" + key + "'");
    return it->second;
  };
  const auto optional = [&](const std::string& key) -> const Entry* {
    auto it = entries.find(key);
    return it == entries.end() ? nullptr : &it->second;
  };

  RunConfig cfg;
  ProblemSpec& p = cfg.problem;

  const auto scale = [&](const std::string& key) {
    const Entry& e = require(key);
    try {
      return parse_time_scale(e.value);
    } catch (const ParseError& err) {
      throw ValidationError(key, e.where + ": field '" + key + "': " + err.what());
    }
  };
  p.scale1 = scale("scale1");
  p.scale2 = scale("scale2");

  if (auto* e = optional("dim")) {
    const long d = parse_int("dim", e->value, e->where);
    if (d < 1)
      throw ValidationError("dim", e->where + ": dim must be >= 1");
    p.dim = std::size_t(d);
  }

  const auto expr = [&](const std::string& key, const Entry& e, std::vector<std::string> vars) {
    try {
      return RhsExpr::parse(e.value, std::move(vars));
    } catch (const ParseError& err) {
      throw ValidationError(key, e.where + ": field '" + key + "': " + err.what());
    }
  };
  const Entry& rhs = require("rhs");
  cfg.rhs_source = rhs.value;
  p.rhs = expr("rhs", rhs, rhs_vars(p.dim));
  if (p.rhs.dim() != p.dim)
    throw ValidationError("rhs", rhs.where + ": rhs has " + std::to_string(p.rhs.dim()) +
                                     " components but dim = " + std::to_string(p.dim));

  const auto positive = [&](const std::string& key, double& target) {
    if (auto* e = optional(key)) {
      target = parse_real(key, e->value, e->where);
      if (!(target > 0.0))
        throw ValidationError(key, e->where + ": field '" + key + "' must be positive");
    }
  };
  positive("h", p.h);
  positive("delta", p.delta);
  positive("tol", p.tol);
  if (auto* e = optional("max_iter")) {
    const long m = parse_int("max_iter", e->value, e->where);
    if (m < 1)
      throw ValidationError("max_iter", e->where + ": field 'max_iter' must be >= 1");
    p.max_iter = int(m);
  }

  const Entry* bG = optional("bound_G");
  const Entry* bg0 = optional("bound_g0");
  if (bool(bG) != bool(bg0))
    throw ValidationError(bG ? "bound_g0" : "bound_G",
                          origin + ": bound_G and bound_g0 must be given together");
  if (bG)
    p.bound = BoundSpec{expr("bound_G", *bG, {"x", "y", "r"}), expr("bound_g0", *bg0, {"x", "y"})};

  if (auto* e = optional("solution_csv"))
    cfg.solution_csv = e->value;
  if (auto* e = optional("report"))
    cfg.report = e->value;
  if (auto* e = optional("study_csv"))
    cfg.study_csv = e->value;

  if (auto* e = optional("study_h")) {
    std::string_view rest = e->value;
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const double hv = parse_real("study_h", trim(rest.substr(0, comma)), e->where);
      if (!(hv > 0.0))
        throw ValidationError("study_h", e->where + ": study_h values must be positive");
      if (!cfg.study_h.empty() && !(hv < cfg.study_h.back()))
        throw ValidationError("study_h", e->where + ": study_h must be strictly decreasing");
      cfg.study_h.push_back(hv);
      rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    }
  }
  if (auto* e = optional("probe_x"))
    cfg.probe_x = parse_real("probe_x", e->value, e->where);
  if (auto* e = optional("probe_y"))
    cfg.probe_y = parse_real("probe_y", e->value, e->where);
  if (auto* e = optional("probe_component")) {
    const long c = parse_int("probe_component", e->value, e->where);
    if (c < 1 || std::size_t(c) > p.dim)
      throw ValidationError("probe_component", e->where + ": probe_component out of range");
    cfg.probe_component = std::size_t(c);
  }
  if (auto* e = optional("oracle"))
    cfg.oracle = parse_real("oracle", e->value, e->where);

  p.validate();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot read config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path.string());
}

} // namespace tsg
