#ifndef QF_QF_HPP
#define QF_QF_HPP

#include "qf/certify.hpp"
#include "qf/diophantine.hpp"
#include "qf/error.hpp"
#include "qf/field.hpp"
#include "qf/numeric.hpp"
#include "qf/qform.hpp"
#include "qf/survey.hpp"

#endif  // QF_QF_HPP
