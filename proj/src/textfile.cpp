#include "qmcnodes/textfile.hpp"

#include <cctype>
#include <cerrno>
#include <climits>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qmcnodes {

namespace {

std::string trim(const std::string& s) {
  std::size_t begin = 0, end = s.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
  return s.substr(begin, end - begin);
}

[[noreturn]] void fail(const std::string& source, int line, const std::string& what) {
  throw std::invalid_argument(source + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

const TextSection* TextFile::find(const std::string& name) const {
  for (const auto& section : sections)
    if (section.name == name) return &section;
  return nullptr;
}

TextFile parse_sectioned_text(const std::string& text, const std::string& source) {
  TextFile file;
  file.source = source;

  std::istringstream stream(text);
  std::string raw;
  int line_number = 0;
  while (std::getline(stream, raw)) {
    ++line_number;
    const std::size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']')
        fail(source, line_number, "malformed section header '" + line + "'");
      const std::string name = trim(line.substr(1, line.size() - 2));
      if (name.empty()) fail(source, line_number, "empty section name");
      if (file.find(name) != nullptr)
        fail(source, line_number, "duplicate section [" + name + "]");
      file.sections.push_back({name, {}, line_number});
      continue;
    }

    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      fail(source, line_number, "expected 'key = value', got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail(source, line_number, "empty key");
    if (value.empty()) fail(source, line_number, "empty value for key '" + key + "'");
    if (file.sections.empty())
      fail(source, line_number, "'" + key + "' appears before any [section]");
    file.sections.back().entries.push_back({key, value, line_number});
  }
  return file;
}

TextFile load_sectioned_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot read '" + path + "'");
  std::ostringstream contents;
  contents << in.rdbuf();
  return parse_sectioned_text(contents.str(), path);
}

void reject_unknown_sections(const TextFile& file,
                             const std::vector<std::string>& allowed) {
  for (const auto& section : file.sections) {
    bool known = false;
    for (const auto& name : allowed) known = known || name == section.name;
    if (!known)
      fail(file.source, section.line, "unknown section [" + section.name + "]");
  }
}

// ---------------------------------------------------------------------------
// SectionReader

SectionReader::SectionReader(const TextFile& file, const TextSection& section)
    : file_(file), section_(section), used_(section.entries.size(), false) {}

std::string SectionReader::context() const {
  return file_.source + ":" + std::to_string(section_.line) + ": [" +
         section_.name + "]";
}

std::string SectionReader::entry_context(const TextEntry& entry) const {
  return file_.source + ":" + std::to_string(entry.line) + ": [" +
         section_.name + "] " + entry.key;
}

bool SectionReader::has(const std::string& key) const {
  for (const auto& entry : section_.entries)
    if (entry.key == key) return true;
  return false;
}

const TextEntry* SectionReader::take(const std::string& key, bool required) {
  const TextEntry* found = nullptr;
  for (std::size_t i = 0; i < section_.entries.size(); ++i) {
    if (section_.entries[i].key != key) continue;
    if (found != nullptr)
      throw std::invalid_argument(entry_context(section_.entries[i]) +
                                  ": duplicate key");
    found = &section_.entries[i];
    used_[i] = true;
  }
  if (found == nullptr && required)
    throw std::invalid_argument(context() + ": missing key '" + key + "'");
  return found;
}

std::string SectionReader::get_string(const std::string& key) {
  return take(key, true)->value;
}

std::string SectionReader::get_string(const std::string& key,
                                      const std::string& fallback) {
  const TextEntry* entry = take(key, false);
  return entry != nullptr ? entry->value : fallback;
}

double SectionReader::get_double(const std::string& key) {
  const TextEntry* entry = take(key, true);
  return parse_double_strict(entry->value, entry_context(*entry));
}

double SectionReader::get_double(const std::string& key, double fallback) {
  const TextEntry* entry = take(key, false);
  return entry != nullptr ? parse_double_strict(entry->value, entry_context(*entry))
                          : fallback;
}

int SectionReader::get_int(const std::string& key) {
  const TextEntry* entry = take(key, true);
  return parse_int_strict(entry->value, entry_context(*entry));
}

int SectionReader::get_int(const std::string& key, int fallback) {
  const TextEntry* entry = take(key, false);
  return entry != nullptr ? parse_int_strict(entry->value, entry_context(*entry))
                          : fallback;
}

bool SectionReader::get_bool(const std::string& key) {
  const TextEntry* entry = take(key, true);
  if (entry->value == "true") return true;
  if (entry->value == "false") return false;
  throw std::invalid_argument(entry_context(*entry) + ": expected true or false");
}

bool SectionReader::get_bool(const std::string& key, bool fallback) {
  if (!has(key)) return fallback;
  return get_bool(key);
}

std::vector<double> SectionReader::get_double_list(const std::string& key) {
  const TextEntry* entry = take(key, true);
  return parse_double_list_strict(entry->value, entry_context(*entry));
}

std::vector<double> SectionReader::get_double_list(
    const std::string& key, const std::vector<double>& fallback) {
  const TextEntry* entry = take(key, false);
  return entry != nullptr
             ? parse_double_list_strict(entry->value, entry_context(*entry))
             : fallback;
}

std::vector<std::string> SectionReader::repeated(const std::string& key) {
  std::vector<std::string> values;
  for (std::size_t i = 0; i < section_.entries.size(); ++i) {
    if (section_.entries[i].key != key) continue;
    values.push_back(section_.entries[i].value);
    used_[i] = true;
  }
  return values;
}

void SectionReader::finish() const {
  for (std::size_t i = 0; i < section_.entries.size(); ++i)
    if (!used_[i])
      throw std::invalid_argument(entry_context(section_.entries[i]) +
                                  ": unknown key");
}

// ---------------------------------------------------------------------------
// Strict number parsing

double parse_double_strict(const std::string& text, const std::string& context) {
  errno = 0;
  char* end = nullptr;
  const double value = std::strtod(text.c_str(), &end);
  if (end != text.c_str() + text.size() || text.empty() || errno == ERANGE)
    throw std::invalid_argument(context + ": expected a number, got '" + text + "'");
  return value;
}

int parse_int_strict(const std::string& text, const std::string& context) {
  errno = 0;
  char* end = nullptr;
  const long value = std::strtol(text.c_str(), &end, 10);
  if (end != text.c_str() + text.size() || text.empty() || errno == ERANGE ||
      value < INT_MIN || value > INT_MAX)
    throw std::invalid_argument(context + ": expected an integer, got '" + text + "'");
  return static_cast<int>(value);
}

std::vector<double> parse_double_list_strict(const std::string& text,
                                             const std::string& context) {
  std::istringstream stream(text);
  std::vector<double> values;
  std::string token;
  while (stream >> token)
    values.push_back(parse_double_strict(token, context));
  if (values.empty())
    throw std::invalid_argument(context + ": expected numbers, got '" + text + "'");
  return values;
}

}  // namespace qmcnodes
