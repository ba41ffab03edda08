// Replays the shell sessions in the markdown docs and diffs their output.
//
// Every ```console block is a session. A line starting with "$ " is a command,
// run with sh from the repository root with the built cluesynth first on PATH.
// The lines up to the next command are its expected stdout, byte for byte. A
// final "[exit N]" line gives the expected exit status (default 0). stderr is
// not compared.

#include <sys/wait.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct Example {
  std::string file;
  int line = 0;
  std::string command;
  std::string expected;
  int exit_code = 0;
};

std::vector<Example> parse(const fs::path& path, const std::string& label) {
  std::ifstream in(path);
  std::vector<Example> out;
  std::string line;
  bool in_block = false;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (!in_block) {
      in_block = line == "```console";
      continue;
    }
    if (line.rfind("```", 0) == 0) {
      in_block = false;
      continue;
    }
    if (line.rfind("$ ", 0) == 0) {
      out.push_back({label, n, line.substr(2), "", 0});
    } else if (!out.empty()) {
      Example& e = out.back();
      if (line.rfind("[exit ", 0) == 0 && line.back() == ']') {
        e.exit_code = std::stoi(line.substr(6));
      } else {
        e.expected += line + "\n";
      }
    }
  }
  return out;
}

struct Outcome {
  int code = -1;
  std::string out;
};

Outcome run(const std::string& command, const fs::path& root, const fs::path& bin_dir) {
  std::string cmd = "cd '" + root.string() + "' && PATH='" + bin_dir.string() + "':\"$PATH\" && { " + command +
                    "\n} 2>/dev/null";
  Outcome o;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return o;
  char buf[4096];
  std::size_t k;
  while ((k = fread(buf, 1, sizeof buf, p)) > 0) o.out.append(buf, k);
  int status = pclose(p);
  o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return o;
}

// First differing line, for the failure message.
std::string first_difference(const std::string& want, const std::string& got) {
  std::istringstream a(want), b(got);
  std::string la, lb;
  for (int i = 1;; ++i) {
    bool ha = static_cast<bool>(std::getline(a, la));
    bool hb = static_cast<bool>(std::getline(b, lb));
    if (!ha && !hb) return "trailing newline differs";
    if (!ha || !hb || la != lb) {
      return "line " + std::to_string(i) + ": expected \"" + (ha ? la : "<end>") + "\", got \"" + (hb ? lb : "<end>") +
             "\"";
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::cerr << "usage: verify_docs <cluesynth executable> <repository root> [markdown files...]\n";
    return 2;
  }
  fs::path exe = fs::absolute(argv[1]);
  fs::path root = fs::absolute(argv[2]);
  std::vector<std::string> files;
  for (int i = 3; i < argc; ++i) files.push_back(argv[i]);
  if (files.empty()) {
    files.push_back("README.md");
    std::vector<std::string> docs;
    for (const auto& e : fs::directory_iterator(root / "docs")) {
      if (e.path().extension() == ".md") docs.push_back("docs/" + e.path().filename().string());
    }
    std::sort(docs.begin(), docs.end());
    files.insert(files.end(), docs.begin(), docs.end());
  }

  // Commands call `cluesynth` by name.
  fs::path bin_dir = fs::temp_directory_path() / "cluesynth-verify-docs";
  fs::create_directories(bin_dir);
  fs::path link = bin_dir / "cluesynth";
  fs::remove(link);
  fs::create_symlink(exe, link);

  int total = 0, failed = 0;
  for (const auto& f : files) {
    for (const Example& e : parse(root / f, f)) {
      ++total;
      Outcome o = run(e.command, root, bin_dir);
      std::string where = e.file + ":" + std::to_string(e.line);
      if (o.code == e.exit_code && o.out == e.expected) {
        std::cout << "PASS  " << where << "  " << e.command << "\n";
        continue;
      }
      ++failed;
      std::cout << "FAIL  " << where << "  " << e.command << "\n";
      if (o.code != e.exit_code) {
        std::cout << "      exit " << o.code << ", expected " << e.exit_code << "\n";
      }
      if (o.out != e.expected) std::cout << "      " << first_difference(e.expected, o.out) << "\n";
    }
  }
  std::cout << failed << " of " << total << " documented commands failed\n";
  if (total == 0) {
    std::cout << "no documented commands found\n";
    return 1;
  }
  return failed == 0 ? 0 : 1;
}
