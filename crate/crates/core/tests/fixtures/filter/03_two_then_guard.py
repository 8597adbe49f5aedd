import smach
import robot_smach_states as states


class FetchCup(smach.StateMachine):
    """Grab a cup from the table.

    Multi-line docstring with the word class inside.
    """
    def __init__(self, robot):
        smach.StateMachine.__init__(self, outcomes=["done", "failed"])
        with self:
            smach.StateMachine.add("GRAB", states.Grab(robot), transitions={"done": "done", "failed": "failed"})

class Deliver(smach.StateMachine):
    def __init__(self, robot):
        smach.StateMachine.__init__(self, outcomes=["done"])
        with self:
            smach.StateMachine.add("SAY", states.Say(robot, "Here you go"), transitions={"spoken": "done"})


if __name__ == "__main__":
    rospy.init_node("fetch")
