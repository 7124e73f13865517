#pragma once

#include <string>

namespace prodist {

// One firm-year observation. c is sales per employee, computed at ingest.
struct ProductivityRecord {
  std::string firm_id;
  int year = 0;
  std::string sector_id;
  double sales_yen = 0.0;
  long employees = 0;
  double c = 0.0;
};

}  // namespace prodist
