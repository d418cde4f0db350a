#pragma once

#include <optional>
#include <string>

#include "mseg/cnn.hpp"
#include "mseg/features.hpp"
#include "mseg/forest.hpp"

namespace mseg {

// Binary model container: magic "MSEG", u16 version, u8 kind, little-endian
// f64 parameter blob with shape counts, trailing CRC32 over everything
// before it.
inline constexpr std::uint16_t kModelFormatVersion = 1;

enum class ModelKind : std::uint8_t { Cnn = 1, RandomForest = 2 };

// The RF path carries its PCA front end inside the model file.
struct RfBundle {
    PcaModel pca;
    RandomForestModel forest;
};

void model_save(const Cnn1dModel& model, const std::string& path);
void model_save(const RfBundle& bundle, const std::string& path);

ModelKind peek_model_kind(const std::string& path);
Cnn1dModel load_cnn(const std::string& path);
RfBundle load_rf(const std::string& path);

}  // namespace mseg
