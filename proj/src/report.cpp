#include "curvlab/report.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "curvlab/errors.hpp"

namespace curvlab {

std::uint64_t fnv1a(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[static_cast<std::size_t>(i)] = digits[v & 0xf];
  return s;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

bool needs_quotes(const std::string& v) {
  if (v.empty()) return true;
  for (char c : v)
    if (c == ' ' || c == '"' || c == '=' || c == '\\' || c == '\t' || c == '\n') return true;
  return false;
}

}  // namespace

Record& Record::add(const std::string& key, const std::string& value) {
  if (!line_.empty()) line_ += ' ';
  line_ += key;
  line_ += '=';
  if (!needs_quotes(value)) {
    line_ += value;
    return *this;
  }
  line_ += '"';
  for (char c : value) {
    if (c == '"' || c == '\\') line_ += '\\';
    if (c == '\n') {
      line_ += "\\n";
      continue;
    }
    line_ += c;
  }
  line_ += '"';
  return *this;
}

std::map<std::string, std::string> parse_record(std::string_view line) {
  std::map<std::string, std::string> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && line[i] == ' ') ++i;
    if (i >= line.size()) break;
    const std::size_t eq = line.find('=', i);
    if (eq == std::string_view::npos) throw InputError("record token without '='");
    std::string key(line.substr(i, eq - i));
    i = eq + 1;
    std::string value;
    if (i < line.size() && line[i] == '"') {
      ++i;
      bool closed = false;
      while (i < line.size()) {
        char c = line[i++];
        if (c == '\\' && i < line.size()) {
          c = line[i++];
          value += c == 'n' ? '\n' : c;
        } else if (c == '"') {
          closed = true;
          break;
        } else {
          value += c;
        }
      }
      if (!closed) throw InputError("unterminated quoted value for key '" + key + "'");
    } else {
      const std::size_t sp = line.find(' ', i);
      const std::size_t end = sp == std::string_view::npos ? line.size() : sp;
      value = std::string(line.substr(i, end - i));
      i = end;
    }
    out[key] = value;
  }
  return out;
}

std::vector<std::map<std::string, std::string>> find_records(const std::string& report,
                                                             const std::string& kind) {
  std::vector<std::map<std::string, std::string>> out;
  std::istringstream is(report);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    auto rec = parse_record(line);
    if (rec["record"] == kind) out.push_back(std::move(rec));
  }
  return out;
}

std::string serialize_frame(const Frame4& f) {
  std::string s;
  for (int c = 0; c < 4; ++c) {
    if (c) s += ';';
    for (int i = 0; i < f.dim(); ++i) {
      if (i) s += ',';
      s += format_double(f.vectors()(i, c));
    }
  }
  return s;
}

Frame4 parse_frame(const std::string& s, int n) {
  Eigen::MatrixXd m(n, 4);
  std::istringstream cols(s);
  std::string col;
  int c = 0;
  while (std::getline(cols, col, ';')) {
    if (c >= 4) throw InputError("frame has more than four vectors");
    std::istringstream comps(col);
    std::string tok;
    int i = 0;
    while (std::getline(comps, tok, ',')) {
      if (i >= n) throw InputError("frame vector longer than n");
      m(i++, c) = std::stod(tok);
    }
    if (i != n) throw InputError("frame vector shorter than n");
    ++c;
  }
  if (c != 4) throw InputError("frame needs four vectors");
  return Frame4::checked(m);
}

std::string trajectory_csv(const Trajectory& traj, const std::vector<double>& margins) {
  std::string out = "t,scal,ric_sq,margin\n";
  for (std::size_t k = 0; k < traj.samples.size(); ++k) {
    const auto c = contractions(traj.samples[k].r);
    out += format_double(traj.samples[k].t) + ',' + format_double(c.scal) + ',' +
           format_double(c.ric.m.squaredNorm()) + ',' +
           format_double(k < margins.size() ? margins[k] : std::nan("")) + '\n';
  }
  return out;
}

}  // namespace curvlab
