#include "gridplan/solver.hpp"

#include "csv.hpp"
#include "gridplan/error.hpp"
#include "gridplan/hashing.hpp"

#include <fcntl.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <sstream>

namespace gridplan {

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::feasible: return "feasible";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::unbounded: return "unbounded";
    case SolveStatus::timeout: return "timeout";
    case SolveStatus::error: return "error";
  }
  return "error";
}

void SolveConfig::validate() const {
  std::vector<std::string> violations;
  if (!(relative_gap >= 0.0)) violations.push_back("solver gap must be >= 0");
  if (!(time_limit_s > 0.0)) violations.push_back("solver time limit must be > 0");
  if (threads < 1) violations.push_back("solver threads must be >= 1");
  const auto known = available_solvers();
  if (std::find(known.begin(), known.end(), solver) == known.end()) {
    violations.push_back("unknown solver '" + solver + "' (expected cbc or highs)");
  }
  if (!violations.empty()) throw ValidationError(std::move(violations));
}

double SolveResult::value(const Model& model, std::string_view name) const {
  const auto var = model.find_variable(name);
  if (!var) throw ValidationError("unknown variable '" + std::string(name) + "'");
  return values.at(var->index);
}

std::map<std::string, double> SolveResult::by_name(const Model& model) const {
  std::map<std::string, double> out;
  for (std::size_t j = 0; j < values.size(); ++j) out.emplace(model.variables()[j].name, values[j]);
  return out;
}

namespace {

std::string env_or(const char* name, const char* fallback) {
  const char* v = std::getenv(name);
  return (v && *v) ? std::string(v) : std::string(fallback);
}

bool executable(const std::string& program) {
  if (program.find('/') != std::string::npos) return ::access(program.c_str(), X_OK) == 0;
  const char* path = std::getenv("PATH");
  if (!path) return false;
  for (const auto& dir : detail::split(path, ':')) {
    if (!dir.empty() && ::access((dir + "/" + program).c_str(), X_OK) == 0) return true;
  }
  return false;
}

struct Completed {
  int exit_code = -1;
  std::string output;
};

// Runs argv with stdout and stderr captured to `log`.
Completed run_process(const std::vector<std::string>& argv, const std::filesystem::path& log) {
  if (!executable(argv.front())) throw SolverError("solver executable not found: " + argv.front());
  std::vector<char*> args;
  for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
  args.push_back(nullptr);

  const pid_t pid = ::fork();
  if (pid < 0) throw SolverError("fork failed");
  if (pid == 0) {
    const int fd = ::open(log.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
    if (fd >= 0) {
      ::dup2(fd, STDOUT_FILENO);
      ::dup2(fd, STDERR_FILENO);
      ::close(fd);
    }
    ::execvp(args[0], args.data());
    ::_exit(127);
  }
  int status = 0;
  while (::waitpid(pid, &status, 0) < 0) {
    if (errno != EINTR) throw SolverError("waitpid failed");
  }
  Completed done;
  done.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
  std::error_code ec;
  if (std::filesystem::exists(log, ec)) done.output = detail::read_text(log);
  return done;
}

double parse_number(const std::string& token, const std::string& raw) {
  try {
    std::size_t used = 0;
    const double v = std::stod(token, &used);
    if (used != token.size()) throw std::invalid_argument(token);
    return v;
  } catch (const std::exception&) {
    throw SolverError("cannot parse number '" + token + "' in solver output", raw);
  }
}

class CbcAdapter final : public SolverAdapter {
public:
  std::string name() const override { return "cbc"; }

  std::string version() const override {
    static std::once_flag once;
    static std::string cached;
    std::call_once(once, [&] {
      cached = "cbc (unknown version)";
      try {
        const auto dir = std::filesystem::temp_directory_path();
        const auto log = dir / ("gridplan-cbc-version-" + std::to_string(::getpid()) + ".txt");
        const auto done = run_process({program(), "-quit"}, log);
        std::filesystem::remove(log);
        std::istringstream in(done.output);
        for (std::string line; std::getline(in, line);) {
          if (line.rfind("Version:", 0) == 0) cached = "CBC " + detail::trim(line.substr(8));
        }
      } catch (const Error&) {
      }
    });
    return cached;
  }

  std::vector<RawSolution> run(std::span<const std::filesystem::path> models, std::span<const std::size_t> row_counts,
                               const SolveConfig& config, const std::filesystem::path& work_dir) const override {
    std::vector<RawSolution> out;
    for (std::size_t i = 0; i < models.size(); ++i) {
      const auto solution = work_dir / ("cbc_" + std::to_string(i) + ".sol");
      const auto log = work_dir / ("cbc_" + std::to_string(i) + ".log");
      auto model = models[i];
      if (config.format == MpsFormat::free) {
        // CBC only switches its reader to free format when the NAME card says so.
        auto text = detail::read_text(model);
        const auto eol = text.find('\n');
        text.insert(eol == std::string::npos ? text.size() : eol, " FREE");
        model = work_dir / ("cbc_" + std::to_string(i) + ".mps");
        detail::write_text(model, text);
      }
      std::vector<std::string> argv{program(), model.string(), "-ratioGap", detail::format_double(config.relative_gap),
                                    "-allowableGap", "0", "-seconds", detail::format_double(config.time_limit_s),
                                    "-randomCbcSeed", std::to_string(config.seed + 1)};
      if (config.threads > 1) {
        argv.push_back("-threads");
        argv.push_back(std::to_string(config.threads));
      }
      for (const char* a : {"-solve", "-printingOptions", "all", "-solution"}) argv.emplace_back(a);
      argv.push_back(solution.string());
      const auto started = std::chrono::steady_clock::now();
      const auto done = run_process(argv, log);
      const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
      if (done.exit_code != 0) {
        throw SolverError("cbc exited with code " + std::to_string(done.exit_code), done.output);
      }
      if (!std::filesystem::exists(solution)) throw SolverError("cbc wrote no solution file", done.output);
      auto raw = parse_cbc_solution(detail::read_text(solution), row_counts[i]);
      raw.wall_time_s = elapsed;
      raw.raw_output = done.output;
      out.push_back(std::move(raw));
    }
    return out;
  }

private:
  static std::string program() {
#ifdef GRIDPLAN_DEFAULT_CBC
    return env_or("GRIDPLAN_CBC", GRIDPLAN_DEFAULT_CBC);
#else
    return env_or("GRIDPLAN_CBC", "cbc");
#endif
  }
};

class HighsAdapter final : public SolverAdapter {
public:
  std::string name() const override { return "highs"; }

  std::string version() const override {
    static std::once_flag once;
    static std::string cached;
    std::call_once(once, [&] {
      cached = "HiGHS (unknown version)";
      try {
        const auto log = std::filesystem::temp_directory_path() /
                         ("gridplan-highs-version-" + std::to_string(::getpid()) + ".txt");
        auto argv = command();
        argv.push_back("--version");
        const auto done = run_process(argv, log);
        std::filesystem::remove(log);
        if (done.exit_code == 0) cached = detail::trim(done.output);
      } catch (const Error&) {
      }
    });
    return cached;
  }

  std::vector<RawSolution> run(std::span<const std::filesystem::path> models, std::span<const std::size_t>,
                               const SolveConfig& config, const std::filesystem::path& work_dir) const override {
    auto argv = command();
    argv.insert(argv.end(), {"--gap", detail::format_double(config.relative_gap), "--time-limit",
                             detail::format_double(config.time_limit_s), "--threads", std::to_string(config.threads),
                             "--seed", std::to_string(config.seed)});
    std::vector<std::filesystem::path> solutions;
    for (std::size_t i = 0; i < models.size(); ++i) {
      solutions.push_back(work_dir / ("highs_" + std::to_string(i) + ".sol"));
      argv.push_back(models[i].string());
      argv.push_back(solutions.back().string());
    }
    const auto done = run_process(argv, work_dir / "highs.log");
    if (done.exit_code != 0) {
      throw SolverError("highs exited with code " + std::to_string(done.exit_code), done.output);
    }
    std::vector<RawSolution> out;
    for (const auto& s : solutions) {
      if (!std::filesystem::exists(s)) throw SolverError("highs wrote no solution file", done.output);
      auto raw = parse_highs_solution(detail::read_text(s));
      raw.raw_output = done.output;
      out.push_back(std::move(raw));
    }
    return out;
  }

private:
  // GRIDPLAN_HIGHS names either the wrapper script or an executable speaking its protocol.
  static std::vector<std::string> command() {
#ifdef GRIDPLAN_DEFAULT_HIGHS_SCRIPT
    const std::string script = env_or("GRIDPLAN_HIGHS", GRIDPLAN_DEFAULT_HIGHS_SCRIPT);
    const std::string python = env_or("GRIDPLAN_PYTHON", GRIDPLAN_DEFAULT_PYTHON);
#else
    const std::string script = env_or("GRIDPLAN_HIGHS", "highs_solve.py");
    const std::string python = env_or("GRIDPLAN_PYTHON", "python3");
#endif
    if (script.size() > 3 && script.compare(script.size() - 3, 3, ".py") == 0) return {python, script};
    return {script};
  }
};

class ScratchDir {
public:
  ScratchDir(const std::filesystem::path& requested, bool keep) : keep_(keep || !requested.empty()) {
    if (!requested.empty()) {
      std::filesystem::create_directories(requested);
      path_ = requested;
      return;
    }
    std::string pattern = (std::filesystem::temp_directory_path() / "gridplan-XXXXXX").string();
    if (!::mkdtemp(pattern.data())) throw IoError("cannot create a temporary directory");
    path_ = pattern;
  }
  ~ScratchDir() {
    std::error_code ec;
    if (!keep_) std::filesystem::remove_all(path_, ec);
  }
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }

private:
  std::filesystem::path path_;
  bool keep_;
};

}  // namespace

std::unique_ptr<SolverAdapter> make_adapter(const std::string& solver) {
  if (solver == "cbc") return std::make_unique<CbcAdapter>();
  if (solver == "highs") return std::make_unique<HighsAdapter>();
  throw ValidationError("unknown solver '" + solver + "' (expected cbc or highs)");
}

std::vector<std::string> available_solvers() { return {"cbc", "highs"}; }

RawSolution parse_cbc_solution(const std::string& text, std::size_t rows) {
  RawSolution out;
  std::istringstream in(text);
  std::string header;
  if (!std::getline(in, header)) throw SolverError("empty cbc solution file", text);
  auto starts = [&](const char* prefix) { return header.rfind(prefix, 0) == 0; };
  const bool no_solution = header.find("no integer solution") != std::string::npos ||
                           header.find("no solution") != std::string::npos;
  if (starts("Optimal")) out.status = SolveStatus::optimal;
  else if (starts("Infeasible") || starts("Integer infeasible")) out.status = SolveStatus::infeasible;
  else if (starts("Unbounded")) out.status = SolveStatus::unbounded;
  else if (starts("Stopped")) out.status = no_solution ? SolveStatus::timeout : SolveStatus::feasible;
  else throw SolverError("unrecognised cbc status line: " + header, text);

  if (out.status != SolveStatus::optimal && out.status != SolveStatus::feasible) return out;
  const auto at = header.find("objective value");
  if (at == std::string::npos) throw SolverError("cbc status line has no objective", text);
  out.objective = parse_number(detail::trim(header.substr(at + 15)), text);

  std::size_t seen = 0;
  for (std::string line; std::getline(in, line);) {
    auto trimmed = detail::trim(line);
    if (trimmed.empty()) continue;
    if (trimmed.rfind("**", 0) == 0) trimmed = detail::trim(trimmed.substr(2));
    std::istringstream fields(trimmed);
    std::string index, name, value;
    if (!(fields >> index >> name >> value)) throw SolverError("malformed cbc solution line: " + line, text);
    if (seen++ < rows) continue;
    out.values[name] = parse_number(value, text);
  }
  return out;
}

RawSolution parse_highs_solution(const std::string& text) {
  RawSolution out;
  std::istringstream in(text);
  std::string key, word;
  if (!(in >> key >> word) || key != "status") throw SolverError("malformed highs solution file", text);
  static const std::map<std::string, SolveStatus> statuses{
      {"optimal", SolveStatus::optimal},     {"feasible", SolveStatus::feasible},
      {"infeasible", SolveStatus::infeasible}, {"unbounded", SolveStatus::unbounded},
      {"timeout", SolveStatus::timeout},     {"error", SolveStatus::error}};
  const auto it = statuses.find(word);
  if (it == statuses.end()) throw SolverError("unknown highs status '" + word + "'", text);
  out.status = it->second;
  std::size_t columns = 0;
  while (in >> key) {
    if (key == "columns") {
      in >> columns;
      break;
    }
    in >> word;
    if (key == "objective") out.objective = parse_number(word, text);
    else if (key == "mip_gap") out.gap = parse_number(word, text);
    else if (key == "wall_time") out.wall_time_s = parse_number(word, text);
  }
  for (std::size_t j = 0; j < columns; ++j) {
    std::string name, value;
    if (!(in >> name >> value)) throw SolverError("truncated highs solution file", text);
    out.values[name] = parse_number(value, text);
  }
  return out;
}

void round_binaries(const Model& model, std::vector<double>& values) {
  std::vector<std::string> violations;
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (model.variables()[j].kind != VarKind::binary) continue;
    const double r = std::round(values[j]);
    if (std::abs(values[j] - r) > 1e-6 || (r != 0.0 && r != 1.0)) {
      violations.push_back("binary '" + model.variables()[j].name + "' has non-integral value " +
                           detail::format_double(values[j]));
    } else {
      values[j] = r;
    }
  }
  if (!violations.empty()) throw ValidationError(std::move(violations));
}

std::vector<SolveResult> solve_batch(std::span<const Model* const> models, const SolveConfig& config) {
  config.validate();
  const auto adapter = make_adapter(config.solver);
  ScratchDir scratch(config.work_dir, config.keep_files);

  std::vector<std::filesystem::path> files;
  std::vector<std::size_t> rows;
  std::vector<MpsNames> names;
  std::vector<std::string> hashes;
  for (std::size_t i = 0; i < models.size(); ++i) {
    const auto text = to_mps(*models[i], config.format);
    files.push_back(scratch.path() / ("model_" + std::to_string(i) + ".mps"));
    detail::write_text(files.back(), text);
    hashes.push_back(blob_hash(text));
    rows.push_back(models[i]->num_constraints());
    names.push_back(mps_names(*models[i], config.format));
  }

  const auto started = std::chrono::steady_clock::now();
  auto raws = adapter->run(files, rows, config, scratch.path());
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  if (raws.size() != models.size()) throw SolverError("solver returned the wrong number of solutions");

  std::vector<SolveResult> results;
  for (std::size_t i = 0; i < models.size(); ++i) {
    auto& raw = raws[i];
    SolveResult r;
    r.status = raw.status;
    r.solver = adapter->name();
    r.instance_hash = hashes[i];
    r.raw_output = std::move(raw.raw_output);
    r.wall_time_s = raw.wall_time_s >= 0.0 ? raw.wall_time_s : elapsed / static_cast<double>(models.size());
    if (r.has_solution()) {
      r.objective = raw.objective;
      r.gap = raw.gap;
      r.values.resize(models[i]->num_variables());
      for (std::size_t j = 0; j < r.values.size(); ++j) {
        const auto it = raw.values.find(names[i].columns[j]);
        if (it == raw.values.end()) {
          throw SolverError("solver output lacks column '" + names[i].columns[j] + "'", r.raw_output);
        }
        r.values[j] = it->second;
      }
      round_binaries(*models[i], r.values);
    }
    results.push_back(std::move(r));
  }
  return results;
}

SolveResult solve(const Model& model, const SolveConfig& config) {
  const Model* one[] = {&model};
  return std::move(solve_batch(one, config).front());
}

}  // namespace gridplan
