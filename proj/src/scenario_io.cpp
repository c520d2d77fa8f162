#include "flownet/scenario_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <fmt/core.h>
#include <yaml-cpp/yaml.h>

namespace flownet {

ParseError::ParseError(const std::string& source, int line, int column,
                       const std::string& message)
    : Error(line > 0 ? fmt::format("{}:{}:{}: {}", source, line, column, message)
                     : fmt::format("{}: {}", source, message)),
      line_(line),
      column_(column) {}

namespace {

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const YAML::Node& node, const std::string& message) const {
    const YAML::Mark mark = node.Mark();
    if (mark.is_null()) throw ParseError(source_, 0, 0, message);
    throw ParseError(source_, mark.line + 1, mark.column + 1, message);
  }

  [[noreturn]] void fail_plain(const std::string& message) const {
    throw ParseError(source_, 0, 0, message);
  }

  void allow_keys(const YAML::Node& map, std::initializer_list<const char*> keys,
                  const std::string& where) const {
    if (!map.IsMap()) fail(map, where + " must be a mapping");
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& kv : map) {
      const auto key = kv.first.as<std::string>();
      if (!allowed.count(key)) fail(kv.first, fmt::format("unknown key '{}' in {}", key, where));
    }
  }

  YAML::Node require(const YAML::Node& map, const char* key, const std::string& where) const {
    const YAML::Node node = map[key];
    if (!node) fail(map, fmt::format("{} is missing '{}'", where, key));
    return node;
  }

  double number(const YAML::Node& node, const std::string& what) const {
    if (!node.IsScalar()) fail(node, what + " must be a number");
    std::string text = node.Scalar();
    std::string lower = text;
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "inf" || lower == "+inf" || lower == ".inf" || lower == "+.inf" ||
        lower == "infinity") {
      return std::numeric_limits<double>::infinity();
    }
    if (lower == "-inf" || lower == "-.inf" || lower == "-infinity") {
      return -std::numeric_limits<double>::infinity();
    }
    const char* begin = text.data();
    const char* end = text.data() + text.size();
    if (begin != end && *begin == '+') ++begin;
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end || std::isnan(value)) {
      fail(node, fmt::format("{}: '{}' is not a number", what, text));
    }
    return value;
  }

  double finite_number(const YAML::Node& node, const std::string& what) const {
    const double v = number(node, what);
    if (!std::isfinite(v)) fail(node, what + " must be finite");
    return v;
  }

  int integer(const YAML::Node& node, const std::string& what) const {
    const double v = finite_number(node, what);
    if (v != std::floor(v) || std::abs(v) > 1e9) fail(node, what + " must be an integer");
    return static_cast<int>(v);
  }

  Vector vector(const YAML::Node& node, Eigen::Index size, const std::string& what,
                bool allow_inf = false) const {
    Vector out(size);
    if (node.IsScalar()) {
      const double v = allow_inf ? number(node, what) : finite_number(node, what);
      out.setConstant(v);
      return out;
    }
    if (!node.IsSequence()) fail(node, what + " must be a number or a list");
    if (static_cast<Eigen::Index>(node.size()) != size) {
      fail(node, fmt::format("{} needs {} entries, got {}", what, size, node.size()));
    }
    for (std::size_t i = 0; i < node.size(); ++i) {
      out(static_cast<Eigen::Index>(i)) =
          allow_inf ? number(node[i], what) : finite_number(node[i], what);
    }
    return out;
  }

  std::vector<Edge> edges(const YAML::Node& node, int n, const std::string& what) const {
    if (!node.IsSequence()) fail(node, what + " must be a list of [tail, head] pairs");
    std::vector<Edge> out;
    for (const auto& item : node) {
      if (!item.IsSequence() || item.size() != 2) fail(item, what + " entries must be [tail, head]");
      Edge e{integer(item[0], what), integer(item[1], what)};
      if (e.tail < 0 || e.tail >= n || e.head < 0 || e.head >= n) {
        fail(item, fmt::format("{}: node index out of range [0, {})", what, n));
      }
      if (e.tail == e.head) fail(item, what + ": self-loop");
      out.push_back(e);
    }
    return out;
  }

  const std::string& source() const { return source_; }

 private:
  std::string source_;
};

ControlMode parse_mode(const Reader& rd, const YAML::Node& node) {
  const std::string s = node.as<std::string>();
  if (s == "saturated") return ControlMode::kSaturated;
  if (s == "unconstrained") return ControlMode::kUnconstrained;
  rd.fail(node, "mode must be 'saturated' or 'unconstrained'");
}

}  // namespace

Scenario parse_scenario(const std::string& text, const std::string& source) {
  Reader rd(source);
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ParseError(source, e.mark.is_null() ? 0 : e.mark.line + 1,
                     e.mark.is_null() ? 0 : e.mark.column + 1, e.msg);
  }
  if (!root.IsMap()) rd.fail_plain("document must be a mapping");

  try {
    rd.allow_keys(root,
                  {"network", "cost", "bounds", "tolerances", "gains", "segments", "sim", "init"},
                  "document");
    Scenario sc;

    const YAML::Node net = rd.require(root, "network", "document");
    rd.allow_keys(net, {"n", "edges", "comm_edges"}, "network");
    sc.network.n = rd.integer(rd.require(net, "n", "network"), "network.n");
    if (sc.network.n < 2) rd.fail(net["n"], "network.n must be >= 2");
    const int n = sc.network.n;
    sc.network.edges = rd.edges(rd.require(net, "edges", "network"), n, "network.edges");
    if (net["comm_edges"]) {
      sc.network.comm_edges = rd.edges(net["comm_edges"], n, "network.comm_edges");
    }
    const int m = static_cast<int>(sc.network.edges.size());

    const YAML::Node cost = rd.require(root, "cost", "document");
    rd.allow_keys(cost, {"q", "r", "s"}, "cost");
    sc.cost.q = rd.vector(rd.require(cost, "q", "cost"), n, "cost.q");
    sc.cost.r = cost["r"] ? rd.vector(cost["r"], n, "cost.r") : Vector::Zero(n);
    sc.cost.s = cost["s"] ? rd.vector(cost["s"], n, "cost.s") : Vector::Zero(n);
    if ((sc.cost.q.array() <= 0.0).any()) rd.fail(cost["q"], "cost.q entries must be > 0");

    sc.bounds = SatBounds::unbounded(n, m);
    if (const YAML::Node b = root["bounds"]) {
      rd.allow_keys(b, {"u_p_min", "u_p_max", "u_e_max"}, "bounds");
      if (b["u_p_min"]) sc.bounds.u_p_min = rd.vector(b["u_p_min"], n, "bounds.u_p_min", true);
      if (b["u_p_max"]) sc.bounds.u_p_max = rd.vector(b["u_p_max"], n, "bounds.u_p_max", true);
      if (b["u_e_max"]) sc.bounds.u_e_max = rd.vector(b["u_e_max"], m, "bounds.u_e_max", true);
      if (!(sc.bounds.u_p_min.array() < sc.bounds.u_p_max.array()).all()) {
        rd.fail(b, "bounds: need u_p_min < u_p_max");
      }
      if (!(sc.bounds.u_e_max.array() > 0.0).all()) rd.fail(b, "bounds: need u_e_max > 0");
    }

    if (const YAML::Node tol = root["tolerances"]) {
      rd.allow_keys(tol, {"eps1", "eps2"}, "tolerances");
      if (tol["eps1"]) sc.eps1 = rd.finite_number(tol["eps1"], "tolerances.eps1");
      if (tol["eps2"]) sc.eps2 = rd.finite_number(tol["eps2"], "tolerances.eps2");
      if (!(sc.eps1 > 0.0) || !(sc.eps2 > 0.0)) rd.fail(tol, "tolerances must be > 0");
    }

    if (const YAML::Node g = root["gains"]) {
      rd.allow_keys(g, {"gamma_e", "gamma_c", "gamma_p", "gamma_l", "theta"}, "gains");
      Gains gains;
      gains.gamma_e = rd.finite_number(rd.require(g, "gamma_e", "gains"), "gains.gamma_e");
      gains.gamma_c = rd.finite_number(rd.require(g, "gamma_c", "gains"), "gains.gamma_c");
      gains.gamma_p = rd.finite_number(rd.require(g, "gamma_p", "gains"), "gains.gamma_p");
      gains.gamma_l = rd.finite_number(rd.require(g, "gamma_l", "gains"), "gains.gamma_l");
      if (g["theta"]) gains.theta = rd.finite_number(g["theta"], "gains.theta");
      try {
        gains.validate();
      } catch (const ValidationError& e) {
        rd.fail(g, e.what());
      }
      sc.gains = gains;
    }

    const YAML::Node segs = rd.require(root, "segments", "document");
    if (!segs.IsSequence() || segs.size() == 0) rd.fail(segs, "segments must be a non-empty list");
    for (std::size_t k = 0; k < segs.size(); ++k) {
      const YAML::Node s = segs[k];
      const std::string where = fmt::format("segment {}", k);
      rd.allow_keys(s, {"t_start", "t_end", "d", "xbar_start", "xbar_slope", "xbar_end", "jump"},
                    where);
      Segment seg;
      seg.t_start = rd.finite_number(rd.require(s, "t_start", where), where + " t_start");
      seg.t_end = rd.finite_number(rd.require(s, "t_end", where), where + " t_end");
      if (!(seg.t_end > seg.t_start)) rd.fail(s, where + ": need t_end > t_start");
      seg.d = rd.vector(rd.require(s, "d", where), n, where + " d");
      if (s["jump"]) seg.jump = s["jump"].as<bool>();
      if (s["xbar_start"]) {
        seg.xbar_start = rd.vector(s["xbar_start"], n, where + " xbar_start");
      } else if (k > 0) {
        const Segment& prev = sc.segments.back();
        seg.xbar_start = prev.xbar_at(prev.t_end);
      } else {
        rd.fail(s, "the first segment needs xbar_start");
      }
      if (s["xbar_slope"] && s["xbar_end"]) rd.fail(s, where + ": give xbar_slope or xbar_end");
      if (s["xbar_end"]) {
        const Vector end = rd.vector(s["xbar_end"], n, where + " xbar_end");
        seg.xbar_slope = (end - seg.xbar_start) / (seg.t_end - seg.t_start);
      } else if (s["xbar_slope"]) {
        seg.xbar_slope = rd.vector(s["xbar_slope"], n, where + " xbar_slope");
      } else {
        seg.xbar_slope = Vector::Zero(n);
      }
      if (k > 0) {
        const Segment& prev = sc.segments.back();
        if (seg.t_start < prev.t_end) {
          rd.fail(s, fmt::format("{} overlaps segment {} (starts at {} before {})", where, k - 1,
                                 seg.t_start, prev.t_end));
        }
        if (seg.t_start > prev.t_end) {
          rd.fail(s, fmt::format("{} leaves a gap after segment {}", where, k - 1));
        }
        const Vector prev_end = prev.xbar_at(prev.t_end);
        const double scale = std::max(1.0, prev_end.cwiseAbs().maxCoeff());
        if (!seg.jump && (seg.xbar_start - prev_end).cwiseAbs().maxCoeff() > 1e-9 * scale) {
          rd.fail(s, where + ": reference jumps without 'jump: true'");
        }
      }
      sc.segments.push_back(std::move(seg));
    }

    if (const YAML::Node sim = root["sim"]) {
      rd.allow_keys(sim, {"dt", "output_stride", "mode"}, "sim");
      if (sim["dt"]) sc.sim.dt = rd.finite_number(sim["dt"], "sim.dt");
      if (!(sc.sim.dt > 0.0)) rd.fail(sim, "sim.dt must be > 0");
      if (sim["output_stride"]) sc.sim.output_stride = rd.integer(sim["output_stride"], "sim.output_stride");
      if (sc.sim.output_stride < 1) rd.fail(sim, "sim.output_stride must be >= 1");
      if (sim["mode"]) sc.sim.mode = parse_mode(rd, sim["mode"]);
    }

    if (const YAML::Node init = root["init"]) {
      if (init.IsScalar()) {
        if (init.as<std::string>() != "steady-state") {
          rd.fail(init, "init must be 'steady-state' or a mapping with x, x_p, x_e");
        }
      } else {
        rd.allow_keys(init, {"x", "x_p", "x_e"}, "init");
        sc.init.kind = InitSpec::Kind::kExplicit;
        sc.init.x = rd.vector(rd.require(init, "x", "init"), n, "init.x");
        sc.init.x_p = rd.vector(rd.require(init, "x_p", "init"), n, "init.x_p");
        sc.init.x_e = rd.vector(rd.require(init, "x_e", "init"), m, "init.x_e");
      }
    }

    try {
      sc.validate();
    } catch (const ValidationError& e) {
      rd.fail_plain(e.what());
    }
    return sc;
  } catch (const YAML::Exception& e) {
    throw ParseError(source, e.mark.is_null() ? 0 : e.mark.line + 1,
                     e.mark.is_null() ? 0 : e.mark.column + 1, e.msg);
  }
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, 0, "cannot open file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path);
}

}  // namespace flownet
