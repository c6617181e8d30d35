# Solves exported LP files with HiGHS and prints the objective.
# usage: python3 check_lp.py file.lp [...]
import sys
import highspy

for path in sys.argv[1:]:
    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.readModel(path)
    h.run()
    print(path, h.modelStatusToString(h.getModelStatus()), h.getInfo().objective_function_value)
