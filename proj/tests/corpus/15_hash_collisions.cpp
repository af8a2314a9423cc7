#include <iostream>
#include <unordered_map>
using namespace std;

int main() {
  unordered_map<int, int> table;
  table[8] = 80;
  table[14] = 140;
  table[-1] = -10;
  table[2] = 20;
  table[20] = 200;
  cout << table[8] + table[14] << endl;
  table.erase(14);
  cout << table.count(14) << " " << table.count(8) << " " << table.size() << endl;
  table[14] = 1;
  table.insert({2, 999});
  cout << table[2] << " " << table[14] << " " << table[-1] << endl;
  if (table.find(20) != table.end()) {
    cout << "found 20" << endl;
  }
  if (table.empty()) {
    cout << "empty" << endl;
  } else {
    cout << "not empty" << endl;
  }
  return 0;
}
