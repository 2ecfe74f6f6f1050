#include "gridplan/mps.hpp"

#include "csv.hpp"

#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <unordered_set>

namespace gridplan {

namespace {

constexpr std::size_t kFieldWidth = 8;

bool has_space(const std::string& s) {
  for (const char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) return true;
  }
  return false;
}

std::uint64_t fnv1a(const std::string& s, std::uint64_t salt) {
  std::uint64_t h = 1469598103934665603ULL ^ (salt * 1099511628211ULL);
  for (const char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

std::string mangle(const std::string& name, std::uint64_t salt) {
  static constexpr char digits[] = "0123456789abcdefghijklmnopqrstuvwxyz";
  std::string prefix;
  for (const char c : name) {
    if (prefix.size() == 3) break;
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') prefix += c;
  }
  while (prefix.size() < 3) prefix += '_';
  auto h = fnv1a(name, salt);
  std::string out = prefix;
  for (int i = 0; i < 5; ++i) {
    out += digits[h % 36];
    h /= 36;
  }
  return out;
}

// `taken` holds every name already assigned in this namespace.
std::vector<std::string> assign(const std::vector<std::string>& names, MpsFormat format,
                                std::unordered_set<std::string>& taken) {
  auto keep = [&](const std::string& n) {
    if (n.empty() || has_space(n)) return false;
    return format == MpsFormat::free || n.size() <= kFieldWidth;
  };
  // Short names claim their slot first so a hash can never steal one.
  std::vector<std::string> out(names.size());
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (keep(names[i]) && taken.insert(names[i]).second) out[i] = names[i];
  }
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (!out[i].empty()) continue;
    for (std::uint64_t salt = 0;; ++salt) {
      auto candidate = mangle(names[i], salt);
      if (taken.insert(candidate).second) {
        out[i] = std::move(candidate);
        break;
      }
    }
  }
  return out;
}

std::string number(double v, MpsFormat format) {
  if (v == 0.0) return "0";
  char buf[40];
  std::snprintf(buf, sizeof buf, format == MpsFormat::fixed ? "%.12g" : "%.17g", v);
  return buf;
}

class Writer {
public:
  explicit Writer(MpsFormat format) : format_(format) {}

  void section(const char* name) {
    out_ += name;
    out_ += '\n';
  }

  // Data line: field 1 (code) followed by up to three name/number fields.
  void line(const std::string& code, const std::string& f2, const std::string& f3 = {},
            const std::string& f4 = {}) {
    if (format_ == MpsFormat::free) {
      out_ += ' ';
      if (!code.empty()) out_ += code + ' ';
      out_ += f2;
      if (!f3.empty()) out_ += ' ' + f3;
      if (!f4.empty()) out_ += ' ' + f4;
      out_ += '\n';
      return;
    }
    std::string l = " ";
    l += code;
    pad(l, 4);
    l += f2;
    if (!f3.empty()) {
      pad(l, 14);
      l += f3;
    }
    if (!f4.empty()) {
      pad(l, 24);
      l += f4;
    }
    out_ += l;
    out_ += '\n';
  }

  std::string take() { return std::move(out_); }

private:
  static void pad(std::string& l, std::size_t column) {
    if (l.size() < column) l.resize(column, ' ');
    else l += ' ';
  }

  MpsFormat format_;
  std::string out_;
};

std::string lp_name(std::string name) {
  for (auto& c : name) {
    if (std::isspace(static_cast<unsigned char>(c))) c = '_';
  }
  if (name.empty() || std::isdigit(static_cast<unsigned char>(name[0])) || name[0] == '.' || name[0] == 'e' ||
      name[0] == 'E') {
    name.insert(name.begin(), '_');
  }
  return name;
}

std::string lp_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

MpsNames mps_names(const Model& model, MpsFormat format) {
  MpsNames names;
  std::vector<std::string> cols, rows;
  for (const auto& v : model.variables()) cols.push_back(v.name);
  for (const auto& c : model.constraints()) rows.push_back(c.name);
  std::unordered_set<std::string> taken_cols;
  names.columns = assign(cols, format, taken_cols);
  std::unordered_set<std::string> taken_rows{names.objective};
  names.rows = assign(rows, format, taken_rows);
  return names;
}

std::string to_mps(const Model& model, MpsFormat format) {
  const auto names = mps_names(model, format);
  const auto& vars = model.variables();
  const auto& rows = model.constraints();

  // Column-major view of the row-wise constraint store.
  std::vector<std::vector<std::pair<std::size_t, double>>> by_column(vars.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (const auto& t : rows[r].terms) by_column[t.var.index].emplace_back(r, t.coef);
  }

  std::string head = "NAME";
  if (format == MpsFormat::fixed) head.resize(14, ' ');
  else head += ' ';
  head += model.formulation();

  Writer w(format);
  w.section(head.c_str());
  w.section("ROWS");
  w.line("N", names.objective);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const char* code = rows[r].sense == Sense::less_equal ? "L" : rows[r].sense == Sense::equal ? "E" : "G";
    w.line(code, names.rows[r]);
  }

  w.section("COLUMNS");
  bool in_integer_block = false;
  std::size_t marker = 0;
  auto toggle_marker = [&](bool integer) {
    char label[16];
    std::snprintf(label, sizeof label, "M%07zu", marker++);
    w.line("", label, "'MARKER'", integer ? "'INTORG'" : "'INTEND'");
    in_integer_block = integer;
  };
  for (std::size_t j = 0; j < vars.size(); ++j) {
    const bool integer = vars[j].kind == VarKind::binary;
    if (integer != in_integer_block) toggle_marker(integer);
    const double c = model.objective()[j];
    bool wrote = false;
    if (c != 0.0) {
      w.line("", names.columns[j], names.objective, number(c, format));
      wrote = true;
    }
    for (const auto& [r, a] : by_column[j]) {
      w.line("", names.columns[j], names.rows[r], number(a, format));
      wrote = true;
    }
    if (!wrote) w.line("", names.columns[j], names.objective, "0");
  }
  if (in_integer_block) toggle_marker(false);

  w.section("RHS");
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].rhs != 0.0) w.line("", "RHS", names.rows[r], number(rows[r].rhs, format));
  }

  w.section("BOUNDS");
  for (std::size_t j = 0; j < vars.size(); ++j) {
    const auto& v = vars[j];
    const auto& n = names.columns[j];
    if (v.kind == VarKind::binary) {
      if (v.lower == v.upper) w.line("FX", "BND", n, number(v.lower, format));
      else w.line("BV", "BND", n);
      continue;
    }
    const bool lo_inf = std::isinf(v.lower);
    const bool up_inf = std::isinf(v.upper);
    if (!lo_inf && v.lower == v.upper) {
      w.line("FX", "BND", n, number(v.lower, format));
    } else if (lo_inf && up_inf) {
      w.line("FR", "BND", n);
    } else {
      if (lo_inf) w.line("MI", "BND", n);
      else if (v.lower != 0.0 || (!up_inf && v.upper < 0.0)) w.line("LO", "BND", n, number(v.lower, format));
      if (!up_inf) w.line("UP", "BND", n, number(v.upper, format));
    }
  }
  w.section("ENDATA");
  return w.take();
}

void export_mps(const Model& model, const std::filesystem::path& path, MpsFormat format) {
  detail::write_text(path, to_mps(model, format));
}

std::string to_lp(const Model& model) {
  const auto& vars = model.variables();
  std::vector<std::string> cols;
  for (const auto& v : vars) cols.push_back(lp_name(v.name));

  std::string out = "\\ " + model.formulation() + "\nMinimize\n obj:";
  auto term = [&](double a, std::size_t j) {
    out += a < 0.0 ? " - " : " + ";
    out += lp_number(std::abs(a));
    out += ' ';
    out += cols[j];
  };
  bool any = false;
  for (std::size_t j = 0; j < vars.size(); ++j) {
    if (model.objective()[j] != 0.0) {
      term(model.objective()[j], j);
      any = true;
    }
  }
  if (!any) out += " 0 " + (cols.empty() ? std::string("x") : cols[0]);
  out += "\nSubject To\n";
  for (const auto& c : model.constraints()) {
    out += ' ' + lp_name(c.name) + ':';
    if (c.terms.empty()) out += " 0 " + (cols.empty() ? std::string("x") : cols[0]);
    for (const auto& t : c.terms) term(t.coef, t.var.index);
    out += c.sense == Sense::less_equal ? " <= " : c.sense == Sense::equal ? " = " : " >= ";
    out += lp_number(c.rhs) + '\n';
  }
  out += "Bounds\n";
  for (std::size_t j = 0; j < vars.size(); ++j) {
    const auto& v = vars[j];
    const bool lo_inf = std::isinf(v.lower);
    const bool up_inf = std::isinf(v.upper);
    if (lo_inf && up_inf) out += ' ' + cols[j] + " free\n";
    else if (!lo_inf && v.lower == v.upper) out += ' ' + cols[j] + " = " + lp_number(v.lower) + '\n';
    else {
      out += ' ' + (lo_inf ? std::string("-inf") : lp_number(v.lower)) + " <= " + cols[j] + " <= " +
             (up_inf ? std::string("+inf") : lp_number(v.upper)) + '\n';
    }
  }
  std::string binaries;
  for (std::size_t j = 0; j < vars.size(); ++j) {
    if (vars[j].kind == VarKind::binary) binaries += ' ' + cols[j] + '\n';
  }
  if (!binaries.empty()) out += "Binaries\n" + binaries;
  out += "End\n";
  return out;
}

nlohmann::json variable_map(const Model& model, MpsFormat format) {
  const auto names = mps_names(model, format);
  nlohmann::json columns = nlohmann::json::array();
  for (std::size_t j = 0; j < model.num_variables(); ++j) {
    columns.push_back({{"mps", names.columns[j]}, {"name", model.variables()[j].name}});
  }
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t r = 0; r < model.num_constraints(); ++r) {
    rows.push_back({{"mps", names.rows[r]}, {"name", model.constraints()[r].name}});
  }
  return {{"formulation", model.formulation()},
          {"format", format == MpsFormat::fixed ? "fixed" : "free"},
          {"objective_row", names.objective},
          {"columns", std::move(columns)},
          {"rows", std::move(rows)}};
}

}  // namespace gridplan
