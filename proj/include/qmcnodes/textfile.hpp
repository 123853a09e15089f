#pragma once

// Strict sectioned key = value text, shared by wave-function files and run
// configs: [section] headers, `key = value` lines, # comments, blank lines.
// Repeated keys are legal and kept in file order (term tables, grids);
// anything unrecognized is an error that names the file, line, and key.

#include <string>
#include <vector>

namespace qmcnodes {

struct TextEntry {
  std::string key;
  std::string value;
  int line = 0;
};

struct TextSection {
  std::string name;
  std::vector<TextEntry> entries;
  int line = 0;
};

struct TextFile {
  std::string source;  // label for error messages (path or "<string>")
  std::vector<TextSection> sections;

  /// nullptr when absent.
  const TextSection* find(const std::string& name) const;
};

/// Throws std::invalid_argument (with source:line) on content before the
/// first section, malformed headers, missing '=', empty keys or values, or
/// duplicate section names.
TextFile parse_sectioned_text(const std::string& text,
                              const std::string& source = "<string>");

/// parse_sectioned_text over a file's bytes; throws std::invalid_argument
/// when the file cannot be read.
TextFile load_sectioned_text(const std::string& path);

/// Throws when the file contains a section whose name is not listed.
void reject_unknown_sections(const TextFile& file,
                             const std::vector<std::string>& allowed);

/// Typed access to one section that tracks which entries were read; finish()
/// rejects the leftovers, which is what makes unknown keys errors.  Getters
/// without a default throw when the key is missing; every getter throws on
/// duplicates (use repeated() for list-valued keys) or unparseable values.
class SectionReader {
 public:
  SectionReader(const TextFile& file, const TextSection& section);

  bool has(const std::string& key) const;

  std::string get_string(const std::string& key);
  std::string get_string(const std::string& key, const std::string& fallback);
  double get_double(const std::string& key);
  double get_double(const std::string& key, double fallback);
  int get_int(const std::string& key);
  int get_int(const std::string& key, int fallback);
  bool get_bool(const std::string& key);
  bool get_bool(const std::string& key, bool fallback);

  /// Whitespace-separated numbers in one value.
  std::vector<double> get_double_list(const std::string& key);
  std::vector<double> get_double_list(const std::string& key,
                                      const std::vector<double>& fallback);

  /// Every value of a repeated key, in file order; may be empty.
  std::vector<std::string> repeated(const std::string& key);

  /// Throws on entries nobody consumed ("unknown key").
  void finish() const;

  /// "source:line: [section]" prefix for error messages about this section.
  std::string context() const;

 private:
  const TextEntry* take(const std::string& key, bool required);
  std::string entry_context(const TextEntry& entry) const;

  const TextFile& file_;
  const TextSection& section_;
  std::vector<bool> used_;
};

/// Parse helpers with full-consumption checks; `context` prefixes errors.
double parse_double_strict(const std::string& text, const std::string& context);
int parse_int_strict(const std::string& text, const std::string& context);
std::vector<double> parse_double_list_strict(const std::string& text,
                                             const std::string& context);

}  // namespace qmcnodes
