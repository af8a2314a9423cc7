#include <iostream>
#include <unordered_map>
#include <vector>
using namespace std;

int main() {
  vector<int> nums = {2, 7, 11, 15, -3, 8};
  int target = 5;
  unordered_map<int, int> seen;
  for (int i = 0; i < nums.size(); i++) {
    int need = target - nums[i];
    if (seen.find(need) != seen.end()) {
      cout << "pair " << seen[need] << " " << i << endl;
    }
    seen[nums[i]] = i;
  }
  cout << seen.count(11) << " " << seen.count(12) << endl;
  seen.erase(11);
  cout << seen.count(11) << " " << seen.size() << endl;
  return 0;
}
