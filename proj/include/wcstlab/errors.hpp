#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace wcst {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration value; the message names the violated bound.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class InputError : public Error {
 public:
  using Error::Error;
};

class EmptyInputError : public InputError {
 public:
  using InputError::InputError;
};

// Operation called out of order (e.g. submitting without a pending trial).
class ProtocolError : public Error {
 public:
  using Error::Error;
};

class SessionCompleteError : public ProtocolError {
 public:
  using ProtocolError::ProtocolError;
};

class ParseError : public Error {
 public:
  ParseError(std::string file, std::string section, int line, const std::string& what)
      : Error(file + (section.empty() ? "" : " [" + section + "]") +
              (line > 0 ? " line " + std::to_string(line) : "") + ": " + what),
        file_(std::move(file)),
        section_(std::move(section)),
        line_(line) {}

  const std::string& file() const { return file_; }
  const std::string& section() const { return section_; }
  int line() const { return line_; }

 private:
  std::string file_;
  std::string section_;
  int line_;
};

class AlignmentError : public Error {
 public:
  AlignmentError(const std::string& what, std::vector<int> trials)
      : Error(what), trials_(std::move(trials)) {}

  const std::vector<int>& trials() const { return trials_; }

 private:
  std::vector<int> trials_;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, int iterations, double last_change)
      : Error(what), iterations_(iterations), last_change_(last_change) {}

  int iterations() const { return iterations_; }
  double last_change() const { return last_change_; }

 private:
  int iterations_;
  double last_change_;
};

// Transport failure or unusable reply from a remote agent.
class RemoteAgentError : public Error {
 public:
  using Error::Error;
};

class RemoteProtocolError : public RemoteAgentError {
 public:
  using RemoteAgentError::RemoteAgentError;
};

// A pipeline stage failed; wraps the underlying message.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what) : Error(what), stage_(std::move(stage)) {}

  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

class StartupError : public Error {
 public:
  using Error::Error;
};

}  // namespace wcst
