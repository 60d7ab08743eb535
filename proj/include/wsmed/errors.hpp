#ifndef WSMED_ERRORS_HPP
#define WSMED_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace wsmed {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Document-level failures: malformed descriptor or knowledge-base documents,
// failed lookups inside an otherwise well-formed document.
class DocumentError : public Error {
public:
    using Error::Error;
};

class ParseError : public DocumentError {
public:
    using DocumentError::DocumentError;
};

class AnnotationError : public DocumentError {
public:
    using DocumentError::DocumentError;
};

class NotFoundError : public DocumentError {
public:
    using DocumentError::DocumentError;
};

// Semantic-level failures: ontology resolution, knowledge-base consistency,
// value conversion.
class SemanticError : public Error {
public:
    using Error::Error;
};

class ConsistencyError : public SemanticError {
public:
    using SemanticError::SemanticError;
};

class UnknownConceptError : public SemanticError {
public:
    using SemanticError::SemanticError;
};

class UnknownTermError : public SemanticError {
public:
    using SemanticError::SemanticError;
};

class IncompleteContextError : public SemanticError {
public:
    using SemanticError::SemanticError;
};

class ValueError : public SemanticError {
public:
    using SemanticError::SemanticError;
};

class ConceptMismatchError : public SemanticError {
public:
    using SemanticError::SemanticError;
};

class MissingRateError : public SemanticError {
public:
    using SemanticError::SemanticError;
};

class ConflictingAnnotationsError : public SemanticError {
public:
    using SemanticError::SemanticError;
};

class ConceptNotCoveredError : public SemanticError {
public:
    using SemanticError::SemanticError;
};

class OutOfRangeError : public SemanticError {
public:
    using SemanticError::SemanticError;
};

// Protocol/simulation failures: community substitution could not proceed or
// a scenario description is unusable.
class ScenarioError : public Error {
public:
    using Error::Error;
};

class EmptyCommunityError : public ScenarioError {
public:
    using ScenarioError::ScenarioError;
};

class NoBiddersError : public ScenarioError {
public:
    using ScenarioError::ScenarioError;
};

class NoSupportError : public ScenarioError {
public:
    using ScenarioError::ScenarioError;
};

class NotRecoveredError : public ScenarioError {
public:
    using ScenarioError::ScenarioError;
};

class NoCommunityError : public ScenarioError {
public:
    using ScenarioError::ScenarioError;
};

class InvalidWeightsError : public ScenarioError {
public:
    using ScenarioError::ScenarioError;
};

class UnboundStepError : public ScenarioError {
public:
    using ScenarioError::ScenarioError;
};

} // namespace wsmed

#endif
