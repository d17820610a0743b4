#pragma once

#include <stdexcept>
#include <string>

namespace radioclass {

// Error classes map 1:1 onto CLI exit codes.
enum class ErrorClass : int {
  Config = 2,   // bad flags, invalid parameter combinations
  Data = 3,     // malformed or inconsistent inputs
  Numeric = 4,  // non-finite values during training
  Asr = 5,      // transcript service failures
};

class Error : public std::runtime_error {
 public:
  Error(ErrorClass cls, const std::string& msg)
      : std::runtime_error(msg), class_(cls) {}
  ErrorClass error_class() const { return class_; }

 private:
  ErrorClass class_;
};

#define RADIOCLASS_DEFINE_ERROR(Name, Class)               \
  class Name : public Error {                              \
   public:                                                 \
    explicit Name(const std::string& msg)                  \
        : Error(ErrorClass::Class, std::string(#Name ": ") + msg) {} \
  }

// audio_io
RADIOCLASS_DEFINE_ERROR(MalformedWav, Data);
RADIOCLASS_DEFINE_ERROR(UnsupportedEncoding, Data);
RADIOCLASS_DEFINE_ERROR(IoError, Data);

// dsp_core
RADIOCLASS_DEFINE_ERROR(NonPowerOfTwo, Config);
RADIOCLASS_DEFINE_ERROR(NonCOLAConfiguration, Config);

// denoise
RADIOCLASS_DEFINE_ERROR(TooFewFrames, Config);
RADIOCLASS_DEFINE_ERROR(DimensionMismatch, Data);
RADIOCLASS_DEFINE_ERROR(EvenWidth, Config);

// spectral_features
RADIOCLASS_DEFINE_ERROR(InvalidRange, Config);
RADIOCLASS_DEFINE_ERROR(NegativeInput, Data);
RADIOCLASS_DEFINE_ERROR(ShapeMismatch, Data);

// textual_features
RADIOCLASS_DEFINE_ERROR(MissingTranscript, Data);
RADIOCLASS_DEFINE_ERROR(AsrServiceError, Asr);
RADIOCLASS_DEFINE_ERROR(EmptyCorpus, Data);

// models
RADIOCLASS_DEFINE_ERROR(EmptyTrainingSet, Data);
RADIOCLASS_DEFINE_ERROR(EmptyEnsemble, Data);
RADIOCLASS_DEFINE_ERROR(SingleClassTrainingSet, Data);
RADIOCLASS_DEFINE_ERROR(NumericError, Numeric);

// eval
RADIOCLASS_DEFINE_ERROR(InsufficientClassExamples, Data);
RADIOCLASS_DEFINE_ERROR(LengthMismatch, Data);
RADIOCLASS_DEFINE_ERROR(SingleClassTruth, Data);
RADIOCLASS_DEFINE_ERROR(NoPositives, Data);

// cli / config validation
RADIOCLASS_DEFINE_ERROR(ConfigError, Config);

#undef RADIOCLASS_DEFINE_ERROR

}  // namespace radioclass
