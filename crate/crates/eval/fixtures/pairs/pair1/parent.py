#!/usr/bin/env python
import rospy
import smach

from robot_skills import get_robot
from robot_smach_states.human_interaction import Say
from robot_smach_states.navigation import NavigateToWaypoint
from robot_smach_states.perception import FindPerson


class ServeGuest(smach.StateMachine):
    """Walk to the living room, find the guest and say hello."""

    def __init__(self, robot, waypoint="living_room"):
        smach.StateMachine.__init__(self, outcomes=["succeeded", "failed"])

        with self:
            # Tell the operator what is going to happen
            smach.StateMachine.add("SAY_START",
                                   Say(robot, "I will go and look for our guest"),
                                   transitions={"spoken": "NAVIGATE_TO_LIVING_ROOM"})

            # Drive to the living room waypoint
            smach.StateMachine.add("NAVIGATE_TO_LIVING_ROOM",
                                   NavigateToWaypoint(robot, waypoint),
                                   transitions={"arrived": "FIND_PERSON",
                                                "unreachable": "failed",
                                                "goal_not_defined": "failed"})

            # Look around until a single person is in view
            smach.StateMachine.add("FIND_PERSON",
                                   FindPerson(robot, timeout=30.0),
                                   transitions={"found": "SAY_HELLO"})

            # Greet whoever was found
            smach.StateMachine.add("SAY_HELLO",
                                   Say(robot, "Hello, welcome to our home"),
                                   transitions={"spoken": "succeeded"})


if __name__ == "__main__":
    rospy.init_node("serve_guest")
    ServeGuest(get_robot("hero")).execute()
