#ifndef WSMED_WSMED_HPP
#define WSMED_WSMED_HPP

#include "wsmed/community.hpp"
#include "wsmed/composition.hpp"
#include "wsmed/descriptor.hpp"
#include "wsmed/errors.hpp"
#include "wsmed/mediation.hpp"
#include "wsmed/ontology.hpp"
#include "wsmed/scenario.hpp"
#include "wsmed/semantic_object.hpp"

#endif
