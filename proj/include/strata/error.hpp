#pragma once

#include <stdexcept>
#include <string>

namespace strata {

enum class Err {
    Parse,
    NonSimplePolygon,
    EdgeMismatch,
    Disconnected,
    AlreadyTranslation,
    HalfTranslationInput,
    SolverFailure,
    RankDeficient,
    NonEquivariantMesh,
    RadiusTooLarge,
    NotClosed,
    NotHarmonic,
    NotPrincipal,
    DiskNotEmbedded,
    Internal,
};

const char* err_name(Err e);

struct Error : std::runtime_error {
    Err code;
    Error(Err c, const std::string& msg)
        : std::runtime_error(std::string(err_name(c)) + ": " + msg), code(c) {}
};

} // namespace strata
