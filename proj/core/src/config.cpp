#include "cdlab/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace cdlab {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

struct ParseState {
  std::vector<std::string> errors;
  std::string origin;

  void fail(int line, const std::string& msg) {
    errors.push_back(origin + ":" + std::to_string(line) + ": " + msg);
  }
};

bool parse_double(const std::string& s, double& out) {
  try {
    std::size_t pos = 0;
    out = std::stod(s, &pos);
    return pos == s.size();
  } catch (...) {
    return false;
  }
}

}  // namespace

const std::vector<std::string>& known_check_names() {
  static const std::vector<std::string> names = {
      "pointwise-cd",   "weak-cd",        "contraction-ii",
      "contraction-iii", "two-time",      "evi",
      "equivalence",    "refinement",     "converse",
      "tilted-symmetry", "entropy-energy", "log-sobolev",
      "fisher-decay",   "entropy-creation", "de-bruijn",
      "hwi",            "hwi-smoothing",  "metric-derivative",
      "gradflow"};
  return names;
}

const SpaceSpec* RunConfig::find_space(const std::string& n) const {
  for (const auto& s : spaces)
    if (s.name == n) return &s;
  return nullptr;
}
const CurvatureSpec* RunConfig::find_curvature(const std::string& n) const {
  for (const auto& c : curvatures)
    if (c.name == n) return &c;
  return nullptr;
}
const DensitySpec* RunConfig::find_density(const std::string& n) const {
  for (const auto& d : densities)
    if (d.name == n) return &d;
  return nullptr;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config_text(text.str(), path);
}

RunConfig parse_config_text(const std::string& text,
                            const std::string& origin) {
  RunConfig cfg;
  ParseState st;
  st.origin = origin;

  enum class Sec { none, output, tolerance, space, curvature, density, experiment };
  Sec sec = Sec::none;
  SpaceSpec* sp = nullptr;
  CurvatureSpec* cv = nullptr;
  DensitySpec* de = nullptr;
  ExperimentSpec* ex = nullptr;

  std::istringstream lines(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(lines, raw)) {
    ++lineno;
    std::string line = raw;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') {
        st.fail(lineno, "unterminated section header");
        continue;
      }
      const std::string head = line.substr(1, line.size() - 2);
      const auto colon = head.find(':');
      const std::string type = colon == std::string::npos
                                   ? head
                                   : head.substr(0, colon);
      const std::string name =
          colon == std::string::npos ? "" : head.substr(colon + 1);
      sp = nullptr; cv = nullptr; de = nullptr; ex = nullptr;
      if (type == "output") sec = Sec::output;
      else if (type == "tolerance") sec = Sec::tolerance;
      else if (type == "space") {
        sec = Sec::space;
        cfg.spaces.push_back(SpaceSpec{});
        sp = &cfg.spaces.back();
        sp->name = name;
        if (name.empty()) st.fail(lineno, "space section needs a name");
      } else if (type == "curvature") {
        sec = Sec::curvature;
        cfg.curvatures.push_back(CurvatureSpec{});
        cv = &cfg.curvatures.back();
        cv->name = name;
        if (name.empty()) st.fail(lineno, "curvature section needs a name");
      } else if (type == "density") {
        sec = Sec::density;
        cfg.densities.push_back(DensitySpec{});
        de = &cfg.densities.back();
        de->name = name;
        if (name.empty()) st.fail(lineno, "density section needs a name");
      } else if (type == "experiment") {
        sec = Sec::experiment;
        cfg.experiments.push_back(ExperimentSpec{});
        ex = &cfg.experiments.back();
        ex->name = name;
        if (name.empty()) st.fail(lineno, "experiment section needs a name");
      } else {
        sec = Sec::none;
        st.fail(lineno, "unknown section type '" + type + "'");
      }
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      st.fail(lineno, "expected key = value");
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    auto want_double = [&](double& out) {
      if (!parse_double(val, out))
        st.fail(lineno, "malformed number '" + val + "' for key '" + key + "'");
    };
    auto want_list = [&](std::vector<double>& out) {
      out.clear();
      for (const std::string& tok : split_ws(val)) {
        double v;
        if (!parse_double(tok, v)) {
          st.fail(lineno, "malformed number '" + tok + "' in list '" + key + "'");
          return;
        }
        out.push_back(v);
      }
    };

    switch (sec) {
      case Sec::output:
        if (key == "dir") cfg.output_dir = val;
        else if (key == "seed") {
          double s;
          want_double(s);
          cfg.seed = static_cast<unsigned long long>(s);
        } else st.fail(lineno, "unknown output key '" + key + "'");
        break;
      case Sec::tolerance:
        if (key == "c_dx") want_double(cfg.tol.c_dx);
        else if (key == "c_quad") want_double(cfg.tol.c_quad);
        else st.fail(lineno, "unknown tolerance key '" + key + "'");
        break;
      case Sec::space:
        if (!sp) break;
        if (key == "kind") {
          if (val == "circle") sp->kind = GridKind::circle;
          else if (val == "interval") sp->kind = GridKind::interval;
          else st.fail(lineno, "unknown grid kind '" + val + "'");
        } else if (key == "n") {
          double v;
          want_double(v);
          sp->n = static_cast<int>(v);
        } else if (key == "domain") {
          std::vector<double> d;
          want_list(d);
          if (d.size() == 2) {
            sp->a = d[0];
            sp->b = d[1];
          } else st.fail(lineno, "domain needs two numbers");
        } else if (key == "potential") {
          const auto toks = split_ws(val);
          if (toks.empty()) {
            st.fail(lineno, "empty potential");
          } else if (toks[0] == "zero" || toks[0] == "quadratic") {
            sp->potential = toks[0];
          } else if (toks[0] == "poly") {
            sp->potential = "poly";
            for (std::size_t k = 1; k < toks.size(); ++k) {
              double v;
              if (!parse_double(toks[k], v)) {
                st.fail(lineno, "malformed poly coefficient '" + toks[k] + "'");
                break;
              }
              sp->poly.push_back(v);
            }
          } else {
            st.fail(lineno, "unknown potential preset '" + toks[0] + "'");
          }
        } else if (key == "normalize") {
          if (val == "true") sp->normalize = true;
          else if (val == "false") sp->normalize = false;
          else st.fail(lineno, "normalize must be true or false");
        } else st.fail(lineno, "unknown space key '" + key + "'");
        break;
      case Sec::curvature:
        if (!cv) break;
        if (key == "R") want_double(cv->R);
        else if (key == "m") {
          if (val == "inf" || val == "+inf") cv->m = 0.0;
          else want_double(cv->m);
        } else if (key == "falsify_dR") {
          if (val == "auto") cv->falsify_dR = -1.0;
          else want_double(cv->falsify_dR);
        } else if (key == "falsify_kappa") want_double(cv->falsify_kappa);
        else st.fail(lineno, "unknown curvature key '" + key + "'");
        break;
      case Sec::density:
        if (!de) break;
        if (key == "preset") de->preset = val;
        else {
          double v;
          want_double(v);
          de->params[key] = v;
        }
        break;
      case Sec::experiment:
        if (!ex) break;
        if (key == "check") ex->check = val;
        else if (key == "space") ex->space = val;
        else if (key == "curvature") ex->curvature = val;
        else if (key == "densities") {
          for (const std::string& tok : split_ws(val))
            ex->densities.push_back(tok);
        } else if (key == "times") want_list(ex->times);
        else if (key == "du") {
          if (val == "auto") ex->du = 0.0;
          else want_double(ex->du);
        } else if (key == "tol") {
          if (val == "auto") ex->tol_override = -1.0;
          else want_double(ex->tol_override);
        } else if (key == "expect") {
          if (val == "pass") ex->expect_fail = false;
          else if (val == "fail") ex->expect_fail = true;
          else st.fail(lineno, "expect must be pass or fail");
        } else ex->extra[key] = val;
        break;
      case Sec::none:
        st.fail(lineno, "key outside of a section");
        break;
    }
  }

  // Cross validation; every error is collected, not just the first.
  auto known_check = [&](const std::string& c) {
    const auto& names = known_check_names();
    return std::find(names.begin(), names.end(), c) != names.end();
  };
  struct Need {
    bool space, curvature;
    int min_densities;
  };
  auto needs = [](const std::string& c) -> Need {
    if (c == "gradflow") return {false, true, 0};
    if (c == "pointwise-cd") return {true, true, 0};
    if (c == "weak-cd" || c == "contraction-ii" || c == "contraction-iii" ||
        c == "two-time" || c == "evi" || c == "refinement")
      return {true, true, 2};
    if (c == "equivalence") return {true, true, 2};
    if (c == "converse") return {true, false, 2};
    if (c == "tilted-symmetry") return {true, false, 1};
    if (c == "de-bruijn" || c == "metric-derivative") return {true, false, 1};
    return {true, true, 1};  // functional inequalities
  };
  auto gated = [](const std::string& c) {
    return c == "entropy-energy" || c == "log-sobolev" ||
           c == "fisher-decay" || c == "entropy-creation" || c == "hwi" ||
           c == "hwi-smoothing";
  };

  std::vector<std::pair<std::string, std::string>> equivalences_seen;
  for (const ExperimentSpec& e : cfg.experiments) {
    const std::string where = "experiment '" + e.name + "'";
    if (e.check.empty()) {
      st.errors.push_back(where + ": missing check name");
      continue;
    }
    if (!known_check(e.check)) {
      st.errors.push_back(where + ": unknown check '" + e.check + "'");
      continue;
    }
    const Need nd = needs(e.check);
    if (nd.space) {
      if (e.space.empty())
        st.errors.push_back(where + ": missing space reference");
      else if (!cfg.find_space(e.space))
        st.errors.push_back(where + ": dangling space '" + e.space + "'");
    }
    if (nd.curvature) {
      if (e.curvature.empty())
        st.errors.push_back(where + ": missing curvature reference");
      else if (!cfg.find_curvature(e.curvature))
        st.errors.push_back(where + ": dangling curvature '" + e.curvature +
                            "'");
    }
    if (static_cast<int>(e.densities.size()) < nd.min_densities)
      st.errors.push_back(where + ": needs at least " +
                          std::to_string(nd.min_densities) + " densities");
    for (const std::string& d : e.densities)
      if (!cfg.find_density(d))
        st.errors.push_back(where + ": dangling density '" + d + "'");
    if (gated(e.check)) {
      const bool ok = std::any_of(
          equivalences_seen.begin(), equivalences_seen.end(),
          [&](const auto& p) {
            return p.first == e.space && p.second == e.curvature;
          });
      if (!ok)
        st.errors.push_back(
            where + ": requires an earlier equivalence experiment on space '" +
            e.space + "' with curvature '" + e.curvature + "'");
    }
    if (e.check == "equivalence")
      equivalences_seen.emplace_back(e.space, e.curvature);
    if (e.tol_override >= 0.0 && !(e.tol_override > 0.0))
      st.errors.push_back(where + ": tolerance must be positive");
  }
  for (const SpaceSpec& s : cfg.spaces) {
    if (s.n < 8)
      st.errors.push_back("space '" + s.name + "': n must be at least 8");
    if (!(s.a < s.b))
      st.errors.push_back("space '" + s.name + "': domain needs a < b");
  }
  for (const CurvatureSpec& c : cfg.curvatures) {
    if (c.m < 0.0)
      st.errors.push_back("curvature '" + c.name +
                          "': m must be positive (or 'inf')");
  }

  if (!st.errors.empty()) {
    std::ostringstream os;
    os << st.errors.size() << " config error(s):";
    for (const std::string& e : st.errors) os << "\n  " << e;
    throw ConfigError(os.str());
  }
  return cfg;
}

}  // namespace cdlab
