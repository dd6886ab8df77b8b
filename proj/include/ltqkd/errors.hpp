#pragma once

#include <stdexcept>
#include <string>

namespace ltqkd {

// Base of every domain error raised by the library. Programming errors
// (bad dimensions, out-of-range arguments) use std::invalid_argument instead.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegenerateStates : public Error {
 public:
  using Error::Error;
};

class FitDiverged : public Error {
 public:
  using Error::Error;
};

class InsufficientData : public Error {
 public:
  using Error::Error;
};

class NotPSD : public Error {
 public:
  using Error::Error;
};

class SingularGram : public Error {
 public:
  using Error::Error;
};

class IllConditioned : public Error {
 public:
  IllConditioned(double cond, const std::string& what) : Error(what), cond_(cond) {}
  double cond() const { return cond_; }

 private:
  double cond_;
};

class NoVirtualDetections : public Error {
 public:
  using Error::Error;
};

class NoSiftedKey : public Error {
 public:
  using Error::Error;
};

class Infeasible : public Error {
 public:
  using Error::Error;
};

class InvalidFilter : public Error {
 public:
  using Error::Error;
};

class BoundViolated : public Error {
 public:
  BoundViolated(double max_excess, const std::string& what) : Error(what), max_excess_(max_excess) {}
  double max_excess() const { return max_excess_; }

 private:
  double max_excess_;
};

}  // namespace ltqkd
